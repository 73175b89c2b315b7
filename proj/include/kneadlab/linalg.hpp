#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace kneadlab {

// Dense square matrix, row major.  Sizes here are tiny (n <= 64), so
// simplicity wins over sparsity everywhere below.
struct SquareMatrix {
    int n = 0;
    std::vector<double> data;

    SquareMatrix() = default;
    explicit SquareMatrix(int n_) : n(n_), data(static_cast<std::size_t>(n_) * n_, 0.0) {}

    double& at(int i, int j) { return data[static_cast<std::size_t>(i) * n + j]; }
    double at(int i, int j) const { return data[static_cast<std::size_t>(i) * n + j]; }

    static SquareMatrix identity(int n_) {
        SquareMatrix m(n_);
        for (int i = 0; i < n_; ++i) m.at(i, i) = 1.0;
        return m;
    }
};

inline SquareMatrix operator*(const SquareMatrix& a, const SquareMatrix& b) {
    SquareMatrix c(a.n);
    for (int i = 0; i < a.n; ++i)
        for (int k = 0; k < a.n; ++k) {
            double aik = a.at(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < a.n; ++j) c.at(i, j) += aik * b.at(k, j);
        }
    return c;
}

// Determinant by LU with partial pivoting; empty matrix has determinant 1.
inline double lu_determinant(SquareMatrix m) {
    const int n = m.n;
    double det = 1.0;
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int row = col + 1; row < n; ++row)
            if (std::fabs(m.at(row, col)) > std::fabs(m.at(pivot, col))) pivot = row;
        if (m.at(pivot, col) == 0.0) return 0.0;
        if (pivot != col) {
            for (int j = 0; j < n; ++j) std::swap(m.at(pivot, j), m.at(col, j));
            det = -det;
        }
        det *= m.at(col, col);
        for (int row = col + 1; row < n; ++row) {
            double factor = m.at(row, col) / m.at(col, col);
            if (factor == 0.0) continue;
            for (int j = col; j < n; ++j) m.at(row, j) -= factor * m.at(col, j);
        }
    }
    return det;
}

namespace detail {

inline double trace(const SquareMatrix& m) {
    double t = 0.0;
    for (int i = 0; i < m.n; ++i) t += m.at(i, i);
    return t;
}

inline double frobenius_norm(const SquareMatrix& m) {
    double s = 0.0;
    for (double v : m.data) s += v * v;
    return std::sqrt(s);
}

// Characteristic polynomial lambda^n + c[0] lambda^{n-1} + ... + c[n-1] via
// Faddeev-LeVerrier.  O(n^4); used for n <= 6 only.
inline std::vector<double> characteristic_polynomial(const SquareMatrix& a) {
    const int n = a.n;
    std::vector<double> c(static_cast<std::size_t>(n), 0.0);
    SquareMatrix m = a;
    for (int k = 1; k <= n; ++k) {
        double ck = -trace(m) / k;
        c[static_cast<std::size_t>(k - 1)] = ck;
        if (k == n) break;
        SquareMatrix shifted = m;
        for (int i = 0; i < n; ++i) shifted.at(i, i) += ck;
        m = a * shifted;
    }
    return c;
}

// All complex roots of a monic polynomial by Durand-Kerner iteration.
inline std::vector<std::complex<double>> polynomial_roots(const std::vector<double>& coeffs) {
    using cplx = std::complex<double>;
    const int deg = static_cast<int>(coeffs.size());
    std::vector<cplx> roots(static_cast<std::size_t>(deg));
    cplx seed(0.4, 0.9);
    cplx p = 1.0;
    for (int i = 0; i < deg; ++i) {
        p *= seed;
        roots[static_cast<std::size_t>(i)] = p;
    }
    auto eval = [&](cplx z) {
        cplx acc = 1.0;
        for (double c : coeffs) acc = acc * z + c;
        return acc;
    };
    for (int iter = 0; iter < 500; ++iter) {
        double shift = 0.0;
        for (int i = 0; i < deg; ++i) {
            cplx denom = 1.0;
            for (int j = 0; j < deg; ++j)
                if (j != i) denom *= roots[static_cast<std::size_t>(i)] - roots[static_cast<std::size_t>(j)];
            if (denom == cplx(0.0, 0.0)) denom = cplx(1e-30, 0.0);
            cplx delta = eval(roots[static_cast<std::size_t>(i)]) / denom;
            roots[static_cast<std::size_t>(i)] -= delta;
            shift = std::max(shift, std::abs(delta));
        }
        if (shift < 1e-14) break;
    }
    return roots;
}

inline std::vector<double> mat_vec(const SquareMatrix& m, const std::vector<double>& v) {
    std::vector<double> out(static_cast<std::size_t>(m.n), 0.0);
    for (int i = 0; i < m.n; ++i) {
        double s = 0.0;
        for (int j = 0; j < m.n; ++j) s += m.at(i, j) * v[static_cast<std::size_t>(j)];
        out[static_cast<std::size_t>(i)] = s;
    }
    return out;
}

inline double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

// Power iteration with a two-term linear fit x_{k+2} ~ s x_{k+1} + t x_k, so
// a dominant complex-conjugate pair is handled as well as a real eigenvalue.
inline double power_fit_estimate(const SquareMatrix& m, double tol, std::mt19937_64& rng) {
    const int n = m.n;
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> v(static_cast<std::size_t>(n));
    for (double& x : v) x = dist(rng);
    double nv = norm2(v);
    if (nv == 0.0) return 0.0;
    for (double& x : v) x /= nv;

    double prev = -1.0;
    int stable = 0;
    for (int iter = 0; iter < 5000; ++iter) {
        std::vector<double> v1 = mat_vec(m, v);
        double n1 = norm2(v1);
        if (n1 == 0.0) return 0.0;
        std::vector<double> v2 = mat_vec(m, v1);

        // least squares for [s t]: minimize ||v2 - s v1 - t v||
        double a11 = 0.0, a12 = 0.0, a22 = 0.0, b1 = 0.0, b2 = 0.0;
        for (int i = 0; i < n; ++i) {
            double x = v[static_cast<std::size_t>(i)];
            double y = v1[static_cast<std::size_t>(i)];
            double z = v2[static_cast<std::size_t>(i)];
            a11 += y * y; a12 += y * x; a22 += x * x;
            b1 += y * z;  b2 += x * z;
        }
        double det = a11 * a22 - a12 * a12;
        double rho;
        if (std::fabs(det) < 1e-300) {
            rho = n1;  // iterate already an eigenvector direction
        } else {
            double s = (b1 * a22 - b2 * a12) / det;
            double t = (a11 * b2 - a12 * b1) / det;
            std::complex<double> disc = std::sqrt(std::complex<double>(s * s + 4.0 * t, 0.0));
            double r1 = std::abs((s + disc) / 2.0);
            double r2 = std::abs((s - disc) / 2.0);
            rho = std::max(r1, r2);
        }
        if (std::fabs(rho - prev) <= tol * std::max(1.0, rho)) {
            if (++stable >= 3) return rho;
        } else {
            stable = 0;
        }
        prev = rho;
        for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = v1[static_cast<std::size_t>(i)] / n1;
    }
    return prev < 0.0 ? 0.0 : prev;
}

// Gelfand estimate rho = lim ||M^{2^k}||^{1/2^k} via repeated squaring with
// per-step normalization.  Converges for any matrix; used as a safety
// envelope for the fitted power iteration at larger sizes.
inline double gelfand_estimate(const SquareMatrix& m) {
    double s0 = frobenius_norm(m);
    if (s0 == 0.0) return 0.0;
    SquareMatrix b = m;
    for (double& v : b.data) v /= s0;
    double log_rho = std::log(s0);
    double weight = 1.0;
    for (int k = 0; k < 45; ++k) {
        b = b * b;
        weight *= 0.5;
        double s = frobenius_norm(b);
        if (s == 0.0) return 0.0;  // nilpotent
        log_rho += weight * std::log(s);
        for (double& v : b.data) v /= s;
    }
    return std::exp(log_rho);
}

}  // namespace detail

// Largest eigenvalue modulus.  Power iteration with random restarts is the
// work horse; for n <= 6 the characteristic polynomial provides the companion
// value (and is returned, being exact at those sizes).
inline double spectral_radius(const SquareMatrix& m, double tol = 1e-10,
                              std::uint64_t seed = 20240901u) {
    if (m.n == 0) return 0.0;
    bool all_zero = true;
    for (double v : m.data)
        if (v != 0.0) { all_zero = false; break; }
    if (all_zero) return 0.0;

    std::mt19937_64 rng(seed);
    double best = 0.0;
    for (int restart = 0; restart < 3; ++restart)
        best = std::max(best, detail::power_fit_estimate(m, tol, rng));

    if (m.n <= 6) {
        std::vector<double> chi = detail::characteristic_polynomial(m);
        double rho_poly = 0.0;
        for (const auto& root : detail::polynomial_roots(chi))
            rho_poly = std::max(rho_poly, std::abs(root));
        return rho_poly;
    }
    double rho_gelfand = detail::gelfand_estimate(m);
    if (std::fabs(best - rho_gelfand) > 1e-6 * std::max(1.0, rho_gelfand)) return rho_gelfand;
    return best;
}

}  // namespace kneadlab
