#include "pdikit/kernel_config.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <sstream>
#include <vector>

#include "pdikit/io.hpp"

namespace pdikit {

namespace {

struct Entry {
    std::string value;
    int line = 0;
    bool used = false;
};

struct Config {
    std::string source;
    std::map<std::string, Entry> keys;       // single-valued keys
    std::vector<std::pair<std::string, int>> atoms;  // repeated atom= lines

    [[noreturn]] void fail_at(int line, const std::string& msg) const {
        fail(ErrorCode::ParseError, source + ":" + std::to_string(line) + ": " + msg);
    }

    bool has(const std::string& key) const { return keys.count(key) > 0; }

    std::string take(const std::string& key) {
        auto it = keys.find(key);
        require(it != keys.end(), ErrorCode::ParseError,
                source + ": missing required key '" + key + "'");
        it->second.used = true;
        return it->second.value;
    }

    std::string take_or(const std::string& key, const std::string& fallback) {
        auto it = keys.find(key);
        if (it == keys.end()) return fallback;
        it->second.used = true;
        return it->second.value;
    }

    double take_number(const std::string& key) {
        auto it = keys.find(key);
        require(it != keys.end(), ErrorCode::ParseError,
                source + ": missing required key '" + key + "'");
        it->second.used = true;
        return parse_number(it->second.value, it->second.line, key);
    }

    double take_number_or(const std::string& key, double fallback) {
        auto it = keys.find(key);
        if (it == keys.end()) return fallback;
        it->second.used = true;
        return parse_number(it->second.value, it->second.line, key);
    }

    double parse_number(const std::string& text, int line, const std::string& key) const {
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
            fail_at(line, "key '" + key + "' is not a number: '" + text + "'");
        }
        return v;
    }

    void reject_unused() const {
        for (const auto& [key, entry] : keys) {
            if (!entry.used) {
                fail(ErrorCode::ParseError,
                     source + ":" + std::to_string(entry.line) + ": unknown key '" + key + "'");
            }
        }
    }
};

Config tokenize(const std::string& text, const std::string& source) {
    Config cfg;
    cfg.source = source;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        size_t a = line.find_first_not_of(" \t\r");
        if (a == std::string::npos) continue;
        size_t b = line.find_last_not_of(" \t\r");
        std::string body = line.substr(a, b - a + 1);
        if (body.empty() || body[0] == '#') continue;
        size_t eq = body.find('=');
        if (eq == std::string::npos) cfg.fail_at(line_no, "expected key=value");
        std::string key = body.substr(0, eq);
        std::string value = body.substr(eq + 1);
        auto strip = [](std::string s) {
            size_t x = s.find_first_not_of(" \t");
            size_t y = s.find_last_not_of(" \t");
            return x == std::string::npos ? std::string() : s.substr(x, y - x + 1);
        };
        key = strip(key);
        value = strip(value);
        if (key.empty()) cfg.fail_at(line_no, "empty key");
        if (key == "atom") {
            cfg.atoms.emplace_back(value, line_no);
        } else {
            if (cfg.keys.count(key)) cfg.fail_at(line_no, "duplicate key '" + key + "'");
            cfg.keys[key] = Entry{value, line_no, false};
        }
    }
    return cfg;
}

std::vector<double> parse_atom(const Config& cfg, const std::string& value, int line,
                               size_t arity) {
    std::istringstream ss(value);
    std::vector<double> out;
    std::string tok;
    while (ss >> tok) {
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc() || ptr != tok.data() + tok.size()) {
            cfg.fail_at(line, "atom component is not a number: '" + tok + "'");
        }
        out.push_back(v);
    }
    if (out.size() != arity) {
        cfg.fail_at(line, "atom needs " + std::to_string(arity) + " components");
    }
    return out;
}

CndKernel parse_factor(Config& cfg, const std::string& prefix) {
    std::string kind = cfg.take(prefix + "_kernel");
    double offset = cfg.take_number_or(prefix + "_offset", 0.0);
    if (kind == "sqeuclidean") return CndKernel::squared_euclidean(offset);
    if (kind == "euclidean") return CndKernel::euclidean(offset);
    if (kind == "power") {
        return CndKernel::power_distance(cfg.take_number(prefix + "_exponent"), offset);
    }
    if (kind == "sphere") return CndKernel::sphere_geodesic(offset);
    if (kind == "precomputed") {
        return CndKernel::precomputed(load_matrix(cfg.take(prefix + "_matrix")), offset);
    }
    fail(ErrorCode::ParseError,
         cfg.source + ": unknown " + prefix + "_kernel '" + kind + "'");
}

bool parse_bool(const Config& cfg, const std::string& value, int line) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    cfg.fail_at(line, "expected true or false, got '" + value + "'");
}

}  // namespace

PdiKernel parse_kernel_config(const std::string& text, const std::string& source_name) {
    Config cfg = tokenize(text, source_name);
    std::string family = cfg.take("family");

    bool centered = false;
    if (cfg.has("centered")) {
        int line = cfg.keys.at("centered").line;
        centered = parse_bool(cfg, cfg.take("centered"), line);
    }

    PdiKernel kernel;
    if (family == "kronecker") {
        require(cfg.atoms.empty(), ErrorCode::ParseError,
                source_name + ": kronecker takes no atom= lines");
        kernel = PdiKernel::kronecker(parse_factor(cfg, "x"), parse_factor(cfg, "y"), centered);
    } else if (family == "bernstein2") {
        std::vector<Bernstein2::Atom2> atoms;
        for (const auto& [value, line] : cfg.atoms) {
            std::vector<double> v = parse_atom(cfg, value, line, 3);
            atoms.push_back({v[0], v[1], v[2]});
        }
        require(!atoms.empty(), ErrorCode::ParseError,
                source_name + ": bernstein2 needs at least one atom= line");
        kernel = PdiKernel::bernstein_compose(Bernstein2::mixture2(std::move(atoms)),
                                              parse_factor(cfg, "x"), parse_factor(cfg, "y"),
                                              centered);
    } else if (family == "cm2sum") {
        std::string psi_kind = cfg.take("psi");
        Cm2Function psi;
        if (psi_kind == "power") {
            psi = Cm2Function::power(cfg.take_number("a"));
        } else if (psi_kind == "tlogt") {
            psi = Cm2Function::t_log_t();
        } else if (psi_kind == "quadratic") {
            psi = Cm2Function::quadratic(cfg.take_number_or("a0", 0.0),
                                         cfg.take_number_or("a1", 0.0),
                                         cfg.take_number_or("a2", 0.0));
        } else if (psi_kind == "mixture") {
            DiscreteMeasure measure;
            measure.allow_zero_atom = false;
            std::vector<std::array<double, 2>> pairs;
            for (const auto& [value, line] : cfg.atoms) {
                std::vector<double> v = parse_atom(cfg, value, line, 2);
                pairs.push_back({v[0], v[1]});
            }
            require(!pairs.empty(), ErrorCode::ParseError,
                    source_name + ": cm2sum mixture needs at least one atom= line");
            measure = DiscreteMeasure::from_pairs(pairs, /*allow_zero_atom=*/false);
            psi = Cm2Function::mixture(std::move(measure), cfg.take_number_or("a0", 0.0),
                                       cfg.take_number_or("a1", 0.0),
                                       cfg.take_number_or("a2", 0.0));
        } else {
            fail(ErrorCode::ParseError, source_name + ": unknown psi '" + psi_kind + "'");
        }
        if (psi_kind != "mixture") {
            require(cfg.atoms.empty(), ErrorCode::ParseError,
                    source_name + ": atom= lines only apply to psi=mixture");
        }
        kernel = PdiKernel::cm2_compose(std::move(psi), parse_factor(cfg, "x"),
                                        parse_factor(cfg, "y"), centered);
    } else if (family == "rawgrid") {
        require(cfg.atoms.empty(), ErrorCode::ParseError,
                source_name + ": rawgrid takes no atom= lines");
        Eigen::MatrixXd M = load_matrix(cfg.take("matrix"));
        auto n = static_cast<Eigen::Index>(cfg.take_number("n"));
        auto m = static_cast<Eigen::Index>(cfg.take_number("m"));
        kernel = PdiKernel::raw_grid(std::move(M), n, m, centered);
    } else {
        fail(ErrorCode::ParseError, source_name + ": unknown family '" + family + "'");
    }

    cfg.reject_unused();
    return kernel;
}

PdiKernel load_kernel_config(const std::string& path) {
    return parse_kernel_config(read_file(path), path);
}

}  // namespace pdikit
