#include "stefan/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>

#include "stefan/errors.hpp"

namespace stefan::config {
namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

bool bare_key_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'; }

class LineParser {
public:
    LineParser(const std::string& text, int line) : s_(text), line_(line) {}

    Value value() {
        skip_ws();
        if (pos_ >= s_.size()) fail("missing value");
        const char c = s_[pos_];
        Value v;
        v.line = line_;
        if (c == '"') {
            v.data = string();
        } else if (c == '[') {
            v.data = array();
        } else if (c == '{') {
            v.data = inline_table();
        } else if (s_.compare(pos_, 4, "true") == 0) {
            pos_ += 4;
            v.data = true;
        } else if (s_.compare(pos_, 5, "false") == 0) {
            pos_ += 5;
            v.data = false;
        } else {
            v.data = number();
        }
        return v;
    }

    std::string key() {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == '"') return string();
        const std::size_t start = pos_;
        while (pos_ < s_.size() && bare_key_char(s_[pos_])) ++pos_;
        if (pos_ == start) fail("expected a key");
        return s_.substr(start, pos_ - start);
    }

    void expect(char c) {
        skip_ws();
        if (pos_ >= s_.size() || s_[pos_] != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    void finish() {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] != '#') fail("unexpected trailing text '" + s_.substr(pos_) + "'");
    }

    [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(line_, msg); }

private:
    void skip_ws() {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
    }

    std::string string() {
        ++pos_;
        std::string out;
        while (pos_ < s_.size() && s_[pos_] != '"') {
            char c = s_[pos_++];
            if (c == '\\') {
                if (pos_ >= s_.size()) fail("unterminated escape");
                const char e = s_[pos_++];
                switch (e) {
                    case 'n': c = '\n'; break;
                    case 't': c = '\t'; break;
                    case '"': c = '"'; break;
                    case '\\': c = '\\'; break;
                    default: fail(std::string("unsupported escape \\") + e);
                }
            }
            out += c;
        }
        if (pos_ >= s_.size()) fail("unterminated string");
        ++pos_;
        return out;
    }

    double number() {
        const std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.' ||
                                    s_[pos_] == '+' || s_[pos_] == '-' || s_[pos_] == '_'))
            ++pos_;
        std::string tok = s_.substr(start, pos_ - start);
        std::erase(tok, '_');
        if (tok == "inf" || tok == "+inf") return std::numeric_limits<double>::infinity();
        if (tok == "-inf") return -std::numeric_limits<double>::infinity();
        const char* b = tok.data() + (tok.size() && tok[0] == '+' ? 1 : 0);
        double v = 0.0;
        const auto [p, ec] = std::from_chars(b, tok.data() + tok.size(), v);
        if (tok.empty() || ec != std::errc() || p != tok.data() + tok.size()) fail("invalid value '" + tok + "'");
        return v;
    }

    std::vector<double> array() {
        ++pos_;
        std::vector<double> out;
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == ']') {
            ++pos_;
            return out;
        }
        while (true) {
            skip_ws();
            out.push_back(number());
            skip_ws();
            if (pos_ < s_.size() && s_[pos_] == ',') {
                ++pos_;
                skip_ws();
                if (pos_ < s_.size() && s_[pos_] == ']') break;
                continue;
            }
            break;
        }
        if (pos_ >= s_.size() || s_[pos_] != ']') fail("arrays must be numeric and close on the same line");
        ++pos_;
        return out;
    }

    std::shared_ptr<Table> inline_table() {
        ++pos_;
        auto t = std::make_shared<Table>();
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == '}') {
            ++pos_;
            return t;
        }
        while (true) {
            const std::string k = key();
            expect('=');
            if (t->count(k)) fail("duplicate key '" + k + "'");
            (*t)[k] = value();
            skip_ws();
            if (pos_ < s_.size() && s_[pos_] == ',') {
                ++pos_;
                continue;
            }
            break;
        }
        expect('}');
        return t;
    }

    const std::string& s_;
    std::size_t pos_ = 0;
    int line_;
};

Table& descend(Table& root, const std::vector<std::string>& path, int line) {
    Table* cur = &root;
    for (const auto& part : path) {
        auto it = cur->find(part);
        if (it == cur->end()) {
            Value v;
            v.data = std::make_shared<Table>();
            v.line = line;
            it = cur->emplace(part, std::move(v)).first;
        } else if (!it->second.is_table()) {
            throw ConfigError(line, "'" + part + "' is already a value, not a section");
        }
        cur = std::get<std::shared_ptr<Table>>(it->second.data).get();
    }
    return *cur;
}

// ---- typed access -----------------------------------------------------------

class Reader {
public:
    Reader(const Table& t, std::string prefix, int line) : t_(t), prefix_(std::move(prefix)), line_(line) {}

    const Value* find(const std::string& k) {
        seen_.insert(k);
        const auto it = t_.find(k);
        return it == t_.end() ? nullptr : &it->second;
    }

    double number(const std::string& k, double def) {
        const Value* v = find(k);
        if (!v) return def;
        if (!v->is_number()) throw ConfigError(v->line, name(k) + " must be a number");
        return std::get<double>(v->data);
    }

    double number(const std::string& k) {
        const Value* v = find(k);
        if (!v) throw ConfigError(line_, "missing required field " + name(k));
        return number(k, 0.0);
    }

    std::optional<double> optional_number(const std::string& k) {
        if (!find(k)) return std::nullopt;
        return number(k, 0.0);
    }

    int integer(const std::string& k, int def) {
        const Value* v = find(k);
        if (!v) return def;
        const double d = number(k, def);
        if (d != std::floor(d) || std::abs(d) > 1e9) throw ConfigError(v->line, name(k) + " must be an integer");
        return static_cast<int>(d);
    }

    std::string string(const std::string& k, const std::string& def) {
        const Value* v = find(k);
        if (!v) return def;
        if (!std::holds_alternative<std::string>(v->data)) throw ConfigError(v->line, name(k) + " must be a string");
        return std::get<std::string>(v->data);
    }

    std::vector<double> array(const std::string& k, std::vector<double> def) {
        const Value* v = find(k);
        if (!v) return def;
        if (!std::holds_alternative<std::vector<double>>(v->data))
            throw ConfigError(v->line, name(k) + " must be an array of numbers");
        return std::get<std::vector<double>>(v->data);
    }

    const Table* table(const std::string& k, int* line = nullptr) {
        const Value* v = find(k);
        if (!v) return nullptr;
        if (!v->is_table()) throw ConfigError(v->line, name(k) + " must be a table");
        if (line) *line = v->line;
        return std::get<std::shared_ptr<Table>>(v->data).get();
    }

    void reject_unknown() const {
        for (const auto& [k, v] : t_)
            if (!seen_.count(k)) throw ConfigError(v.line, "unknown field " + name(k));
    }

    std::string name(const std::string& k) const { return prefix_.empty() ? k : prefix_ + "." + k; }
    int line() const { return line_; }

private:
    const Table& t_;
    std::string prefix_;
    int line_;
    std::set<std::string> seen_;
};

CoefficientFn coefficient(Reader& parent, const std::string& k) {
    int line = parent.line();
    const Table* t = parent.table(k, &line);
    if (!t) throw ConfigError(parent.line(), "missing required coefficient " + parent.name(k));
    Reader r(*t, parent.name(k), line);
    const std::string fam = r.string("family", "constant");
    CoefficientFn f;
    try {
        if (fam == "constant") {
            f = CoefficientFn::constant(r.number("a"));
        } else if (fam == "affine") {
            f = CoefficientFn::affine(r.number("a"), r.number("b"));
        } else if (fam == "power") {
            f = CoefficientFn::power(r.number("a"), r.number("p"));
        } else if (fam == "tabulated") {
            f = CoefficientFn::tabulated(r.array("theta", {}), r.array("value", {}));
        } else {
            throw ConfigError(line, r.name("family") + ": unknown family '" + fam +
                                        "' (constant, affine, power, tabulated)");
        }
    } catch (const DomainError& e) {
        throw ConfigError(line, r.name("") + " " + e.what());
    }
    r.reject_unknown();
    return f;
}

void read_phase(Reader& problem, const std::string& phase, CoefficientFn& lambda, CoefficientFn& c,
                CoefficientFn& rho) {
    int line = problem.line();
    const Table* t = problem.table(phase, &line);
    if (!t) throw ConfigError(problem.line(), "missing section [" + problem.name(phase) + "]");
    Reader r(*t, problem.name(phase), line);
    lambda = coefficient(r, "lambda");
    c = coefficient(r, "c");
    rho = coefficient(r, "rho");
    r.reject_unknown();
}

}  // namespace

Table parse(const std::string& text) {
    Table root;
    Table* current = &root;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    std::set<std::string> sections;
    while (std::getline(in, raw)) {
        ++line;
        const std::string s = trim(raw);
        if (s.empty() || s[0] == '#') continue;
        if (s[0] == '[') {
            const auto close = s.find(']');
            if (close == std::string::npos) throw ConfigError(line, "unterminated section header");
            if (s.size() > 1 && s[1] == '[') throw ConfigError(line, "arrays of tables are not supported");
            const std::string rest = trim(s.substr(close + 1));
            if (!rest.empty() && rest[0] != '#') throw ConfigError(line, "unexpected text after section header");
            const std::string name = trim(s.substr(1, close - 1));
            std::vector<std::string> path;
            std::stringstream ss(name);
            for (std::string part; std::getline(ss, part, '.');) {
                part = trim(part);
                if (part.empty() || !std::all_of(part.begin(), part.end(), bare_key_char))
                    throw ConfigError(line, "invalid section name '" + name + "'");
                path.push_back(part);
            }
            if (path.empty()) throw ConfigError(line, "empty section name");
            if (!sections.insert(name).second) throw ConfigError(line, "duplicate section [" + name + "]");
            current = &descend(root, path, line);
            continue;
        }
        LineParser p(s, line);
        const std::string k = p.key();
        p.expect('=');
        Value v = p.value();
        p.finish();
        if (current->count(k)) throw ConfigError(line, "duplicate key '" + k + "'");
        (*current)[k] = std::move(v);
    }
    return root;
}

Table parse_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError(0, "cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str());
}

Format parse_format(const std::string& s) {
    if (s == "csv") return Format::Csv;
    if (s == "json") return Format::Json;
    if (s == "both") return Format::Both;
    throw ConfigError(0, "format must be csv, json or both (got '" + s + "')");
}

RunConfig from_table(const Table& t) {
    RunConfig cfg;
    Reader root(t, "", 0);

    int line = 0;
    const Table* pt = root.table("problem", &line);
    if (!pt) throw ConfigError(0, "missing section [problem]");
    {
        Reader r(*pt, "problem", line);
        auto& p = cfg.problem;
        p.nu = r.number("nu");
        p.theta_b = r.number("theta_b");
        p.theta_m = r.number("theta_m");
        p.l_b = r.number("l_b");
        p.l_m = r.number("l_m");
        p.gamma_b = r.number("gamma_b");
        p.gamma_m = r.number("gamma_m");
        read_phase(r, "liquid", p.lambda1, p.c1, p.rho1);
        read_phase(r, "solid", p.lambda2, p.c2, p.rho2);
        r.reject_unknown();
        try {
            validate(p);
        } catch (const DomainError& e) {
            throw ConfigError(line, std::string("[problem] ") + e.what());
        }
    }

    if (const Table* et = root.table("envelopes", &line)) {
        Reader r(*et, "envelopes", line);
        auto& e = cfg.envelopes;
        const std::string mode = r.string("mode", "auto");
        if (mode != "auto" && mode != "explicit")
            throw ConfigError(line, "envelopes.mode must be \"auto\" or \"explicit\"");
        e.automatic = mode == "auto";
        e.mu = r.optional_number("mu");
        e.delta = r.optional_number("delta");
        if (!e.automatic) {
            auto& q = e.params;
            q.L1m = r.number("L1m"); q.L1M = r.number("L1M"); q.N1m = r.number("N1m"); q.N1M = r.number("N1M");
            q.L2m = r.number("L2m"); q.L2M = r.number("L2M"); q.N2m = r.number("N2m"); q.N2M = r.number("N2M");
            q.Lt1 = r.number("Lt1", 0.0); q.Lt2 = r.number("Lt2", 0.0);
            q.Nt1 = r.number("Nt1", 0.0); q.Nt2 = r.number("Nt2", 0.0);
            if (!e.mu || !e.delta) throw ConfigError(line, "explicit envelopes need mu and delta");
            q.mu = *e.mu;
            q.delta = *e.delta;
            for (double v : {q.L1m, q.L1M, q.N1m, q.N1M, q.L2m, q.L2M, q.N2m, q.N2M})
                if (!(v > 0.0)) throw ConfigError(line, "explicit envelope constants must be positive");
        }
        r.reject_unknown();
    }

    if (const Table* st = root.table("solver", &line)) {
        Reader r(*st, "solver", line);
        auto& o = cfg.solver;
        o.fp_tol = r.number("fp_tol", o.fp_tol);
        o.fp_max_iters = r.integer("fp_max_iters", o.fp_max_iters);
        o.damping = r.number("damping", o.damping);
        o.root_tol = r.number("root_tol", o.root_tol);
        o.bracket_grid = r.integer("bracket_grid", o.bracket_grid);
        o.beta_lo = r.number("beta_lo", o.beta_lo);
        o.beta_hi = r.number("beta_hi", o.beta_hi);
        o.grid_n = r.integer("grid_n", o.grid_n);
        o.quad.abs_tol = r.number("quad_abs_tol", o.quad.abs_tol);
        o.quad.rel_tol = r.number("quad_rel_tol", o.quad.rel_tol);
        const std::string bal = r.string("balance", "consistent");
        if (bal == "consistent") o.balance = Balance::Consistent;
        else if (bal == "as_printed") o.balance = Balance::AsPrinted;
        else throw ConfigError(line, "solver.balance must be \"consistent\" or \"as_printed\"");
        r.reject_unknown();
        try {
            o.validate();
        } catch (const DomainError& e) {
            throw ConfigError(line, e.what());
        }
    }

    if (const Table* ot = root.table("output", &line)) {
        Reader r(*ot, "output", line);
        auto& o = cfg.output;
        o.dir = r.string("dir", o.dir);
        o.format = parse_format(r.string("format", "both"));
        o.field_times = r.array("field_times", o.field_times);
        o.field_r_points = r.integer("field_r_points", o.field_r_points);
        o.field_r_span = r.number("field_r_span", o.field_r_span);
        o.boundary_t_max = r.number("boundary_t_max", o.boundary_t_max);
        o.boundary_steps = r.integer("boundary_steps", o.boundary_steps);
        r.reject_unknown();
        for (double t : o.field_times)
            if (!(t > 0.0)) throw ConfigError(line, "output.field_times must be positive");
        if (o.field_r_points < 2 || !(o.field_r_span > 1.0) || !(o.boundary_t_max > 0.0) || o.boundary_steps < 1)
            throw ConfigError(line, "output sampling settings out of range");
    }
    root.reject_unknown();
    return cfg;
}

RunConfig load(const std::string& path) { return from_table(parse_file(path)); }

}  // namespace stefan::config
