#pragma once

#include <stdexcept>
#include <string>

namespace kneadlab {

// Orbit left every candidate core interval; the parameter is outside the
// valid window (or floating drift pushed a boundary orbit out).
class OrbitEscaped : public std::runtime_error {
public:
    OrbitEscaped(int step, double value)
        : std::runtime_error("orbit escaped at step " + std::to_string(step) +
                             " (|w| = " + std::to_string(value) + ")"),
          step_(step), value_(value) {}
    int step() const { return step_; }
    double value() const { return value_; }

private:
    int step_;
    double value_;
};

class NotSelfMap : public std::runtime_error {
public:
    NotSelfMap(double a, double a_max)
        : std::runtime_error("a = " + std::to_string(a) +
                             " exceeds the self-map bound " + std::to_string(a_max)) {}
};

// z_1 - z_{j+1} <= 0: the signed inverse branch is not defined there.
class BranchDomain : public std::runtime_error {
public:
    explicit BranchDomain(int index)
        : std::runtime_error("branch argument non-positive at component " +
                             std::to_string(index)),
          index_(index) {}
    int index() const { return index_; }

private:
    int index_;
};

class BranchDomainDuringIteration : public std::runtime_error {
public:
    BranchDomainDuringIteration(int iteration, int component)
        : std::runtime_error("branch domain violated at iteration " +
                             std::to_string(iteration) + ", component " +
                             std::to_string(component) +
                             " (sign pattern likely inadmissible)"),
          iteration_(iteration), component_(component) {}
    int iteration() const { return iteration_; }
    int component() const { return component_; }

private:
    int iteration_;
    int component_;
};

class NoConvergence : public std::runtime_error {
public:
    explicit NoConvergence(const std::string& what) : std::runtime_error(what) {}
};

class NoBracket : public std::runtime_error {
public:
    explicit NoBracket(const std::string& what) : std::runtime_error(what) {}
};

class PrefixMismatch : public std::runtime_error {
public:
    explicit PrefixMismatch(const std::string& what) : std::runtime_error(what) {}
};

class NearCriticalOrbit : public std::runtime_error {
public:
    NearCriticalOrbit(int index, double value)
        : std::runtime_error("orbit point w_" + std::to_string(index) +
                             " = " + std::to_string(value) +
                             " is too close to the critical point"),
          index_(index) {}
    int index() const { return index_; }

private:
    int index_;
};

// r_continuity_probe precondition: some |w_i| below the sign-stability margin.
class NearCritical : public std::runtime_error {
public:
    NearCritical(int index, double value)
        : std::runtime_error("w_" + std::to_string(index) + " = " +
                             std::to_string(value) +
                             " too close to 0 for a stable itinerary") {}
};

class NotSuperstable : public std::runtime_error {
public:
    explicit NotSuperstable(const std::string& what) : std::runtime_error(what) {}
};

class DepthTooLarge : public std::runtime_error {
public:
    explicit DepthTooLarge(std::size_t nodes)
        : std::runtime_error("preimage tree exceeded the node budget (" +
                             std::to_string(nodes) + " nodes)") {}
};

class ParityViolation : public std::logic_error {
public:
    explicit ParityViolation(const std::string& what) : std::logic_error(what) {}
};

}  // namespace kneadlab
