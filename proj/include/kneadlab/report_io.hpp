#pragma once

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "kneadlab/sweep.hpp"

namespace kneadlab {

// 17 significant digits: enough for bit-exact double round trips.
inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline const char* kSweepCsvHeader = "a,r,word,h_kneading,h_kneading_err,h_laps,h_laps_err,flags";

inline void write_csv(const SweepReport& report, std::ostream& out) {
    out << kSweepCsvHeader << '\n';
    for (const SweepRecord& rec : report.records) {
        out << format_double(rec.a) << ',' << format_double(rec.r) << ',' << rec.word.str() << ','
            << format_double(rec.entropy_kneading.value) << ','
            << format_double(rec.entropy_kneading.error_bound) << ',';
        if (rec.entropy_laps) {
            out << format_double(rec.entropy_laps->value) << ','
                << format_double(rec.entropy_laps->error_bound);
        } else {
            out << ',';
        }
        out << ',' << flags_to_string(rec.flags) << '\n';
    }
    out << "# violations: " << report.violations.size() << '\n';
    for (const Violation& v : report.violations) {
        out << "# violation: kind="
            << (v.kind == Violation::Kind::word_order ? "word_order" : "entropy_order")
            << " i=" << v.i << " j=" << v.j << " magnitude=" << format_double(v.magnitude) << '\n';
    }
    out << "# max_entropy_backstep: " << format_double(report.max_entropy_backstep) << '\n';
}

// Data rows only; the summary block is comments.  Used by tests to confirm
// the round trip and available to downstream pipelines.
struct ParsedCsvRow {
    double a = 0.0;
    double r = 0.0;
    std::string word;
    double h_kneading = 0.0;
    double h_kneading_err = 0.0;
    bool has_laps = false;
    double h_laps = 0.0;
    double h_laps_err = 0.0;
    std::string flags;
};

inline std::vector<ParsedCsvRow> parse_csv(std::istream& in) {
    std::vector<ParsedCsvRow> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (first) {
            first = false;
            if (line != kSweepCsvHeader)
                throw std::runtime_error("unexpected CSV header: " + line);
            continue;
        }
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        for (;;) {
            std::size_t comma = line.find(',', start);
            if (comma == std::string::npos) {
                fields.push_back(line.substr(start));
                break;
            }
            fields.push_back(line.substr(start, comma - start));
            start = comma + 1;
        }
        if (fields.size() != 8) throw std::runtime_error("bad CSV row: " + line);
        ParsedCsvRow row;
        row.a = std::strtod(fields[0].c_str(), nullptr);
        row.r = std::strtod(fields[1].c_str(), nullptr);
        row.word = fields[2];
        row.h_kneading = std::strtod(fields[3].c_str(), nullptr);
        row.h_kneading_err = std::strtod(fields[4].c_str(), nullptr);
        row.has_laps = !fields[5].empty();
        if (row.has_laps) {
            row.h_laps = std::strtod(fields[5].c_str(), nullptr);
            row.h_laps_err = std::strtod(fields[6].c_str(), nullptr);
        }
        row.flags = fields[7];
        rows.push_back(std::move(row));
    }
    return rows;
}

inline void write_json(const SweepReport& report, std::ostream& out) {
    nlohmann::ordered_json root;
    root["r"] = report.r;
    nlohmann::ordered_json records = nlohmann::ordered_json::array();
    for (const SweepRecord& rec : report.records) {
        nlohmann::ordered_json item;
        item["a"] = rec.a;
        item["r"] = rec.r;
        item["word"] = rec.word.str();
        item["h_kneading"] = rec.entropy_kneading.value;
        item["h_kneading_err"] = rec.entropy_kneading.error_bound;
        if (rec.entropy_laps) {
            item["h_laps"] = rec.entropy_laps->value;
            item["h_laps_err"] = rec.entropy_laps->error_bound;
        } else {
            item["h_laps"] = nullptr;
            item["h_laps_err"] = nullptr;
        }
        item["flags"] = flags_to_string(rec.flags);
        records.push_back(std::move(item));
    }
    root["records"] = std::move(records);
    nlohmann::ordered_json violations = nlohmann::ordered_json::array();
    for (const Violation& v : report.violations) {
        nlohmann::ordered_json item;
        item["kind"] = v.kind == Violation::Kind::word_order ? "word_order" : "entropy_order";
        item["i"] = v.i;
        item["j"] = v.j;
        item["magnitude"] = v.magnitude;
        violations.push_back(std::move(item));
    }
    root["violations"] = std::move(violations);
    root["max_entropy_backstep"] = report.max_entropy_backstep;
    out << root.dump(2) << '\n';
}

}  // namespace kneadlab
