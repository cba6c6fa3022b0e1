#pragma once

// Run configuration: a TOML subset (sections, dotted section names, scalars,
// strings, booleans, one-line number arrays, one-line inline tables) mapped
// onto ProblemSpec, SolveOptions and output settings.

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "stefan/solver.hpp"

namespace stefan::config {

class ConfigError : public std::runtime_error {
public:
    ConfigError(int line, const std::string& msg)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg), line(line) {}
    int line;
};

struct Value;
using Table = std::map<std::string, Value>;

struct Value {
    std::variant<double, bool, std::string, std::vector<double>, std::shared_ptr<Table>> data;
    int line = 0;

    bool is_number() const { return std::holds_alternative<double>(data); }
    bool is_table() const { return std::holds_alternative<std::shared_ptr<Table>>(data); }
};

Table parse(const std::string& text);
Table parse_file(const std::string& path);

enum class Format { Csv, Json, Both };

struct OutputConfig {
    std::string dir = "out";
    Format format = Format::Both;
    std::vector<double> field_times{0.25, 1.0, 4.0};
    int field_r_points = 64;
    double field_r_span = 3.0;  // r runs from alpha(t) to field_r_span * beta(t)
    double boundary_t_max = 10.0;
    int boundary_steps = 100;
};

struct RunConfig {
    ProblemSpec problem;
    EnvelopeChoice envelopes;
    SolveOptions solver;
    OutputConfig output;
};

RunConfig from_table(const Table& t);
RunConfig load(const std::string& path);

Format parse_format(const std::string& s);

}  // namespace stefan::config
