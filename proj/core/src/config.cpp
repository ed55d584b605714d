#include "pspp/config.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace pspp {

std::string format_double(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    if (ec != std::errc{}) {
        std::snprintf(buf, sizeof(buf), "%.17g", x);
        return buf;
    }
    return std::string(buf, ptr);
}

namespace {

struct Cursor {
    std::string_view text;
    int line;
    std::size_t pos = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw config_error(msg, line, static_cast<int>(pos) + 1);
    }
    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    bool done() {
        skip_ws();
        return pos >= text.size();
    }
    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }
    void expect(char c) {
        if (peek() != c) {
            fail(std::string("expected '") + c + "'");
        }
        ++pos;
    }

    double number() {
        skip_ws();
        const char* begin = text.data() + pos;
        const char* end = text.data() + text.size();
        double out = 0.0;
        auto [ptr, ec] = std::from_chars(begin, end, out);
        if (ec != std::errc{} || ptr == begin) fail("expected a number");
        pos += static_cast<std::size_t>(ptr - begin);
        return out;
    }

    std::vector<double> number_list() {
        expect('[');
        std::vector<double> vals;
        if (peek() != ']') {
            vals.push_back(number());
            while (peek() == ',') {
                ++pos;
                vals.push_back(number());
            }
        }
        expect(']');
        return vals;
    }

    std::string word() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() && text[pos] != ',' && text[pos] != ']' &&
               !std::isspace(static_cast<unsigned char>(text[pos]))) {
            ++pos;
        }
        if (pos == start) fail("expected a value");
        return std::string(text.substr(start, pos - start));
    }

    std::vector<std::string> word_list() {
        expect('[');
        std::vector<std::string> vals;
        if (peek() != ']') {
            vals.push_back(word());
            while (peek() == ',') {
                ++pos;
                vals.push_back(word());
            }
        }
        expect(']');
        return vals;
    }

    void end() {
        if (!done()) fail("trailing characters after value");
    }
};

Vector parse_vector(Cursor& c) {
    const auto vals = c.number_list();
    c.end();
    Vector v(static_cast<Index>(vals.size()));
    for (std::size_t i = 0; i < vals.size(); ++i) v[static_cast<Index>(i)] = vals[i];
    return v;
}

Matrix parse_matrix(Cursor& c) {
    c.expect('[');
    std::vector<std::vector<double>> rows;
    rows.push_back(c.number_list());
    while (c.peek() == ',') {
        ++c.pos;
        rows.push_back(c.number_list());
    }
    c.expect(']');
    c.end();
    const std::size_t ncol = rows[0].size();
    for (const auto& r : rows) {
        if (r.size() != ncol) c.fail("ragged matrix rows");
    }
    Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(ncol));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < ncol; ++j) {
            m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
        }
    }
    return m;
}

double parse_number(Cursor& c) {
    const double v = c.number();
    c.end();
    return v;
}

long parse_integer(Cursor& c) {
    const double v = parse_number(c);
    const long i = static_cast<long>(v);
    if (static_cast<double>(i) != v) c.fail("expected an integer");
    return i;
}

std::string parse_string(Cursor& c) {
    c.skip_ws();
    std::string s(c.text.substr(c.pos));
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.pop_back();
    }
    if (s.empty()) c.fail("expected a value");
    c.pos = c.text.size();
    return s;
}

std::string trim(std::string_view s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

void validate_config(const RunConfig& cfg) {
    if (cfg.discounts) {
        for (Index i = 0; i < cfg.discounts->size(); ++i) {
            const double d = (*cfg.discounts)[i];
            if (!(d > 0.0 && d <= 1.0)) {
                throw config_error("discount " + format_double(d) +
                                   " out of (0, 1]");
            }
        }
    }
    if (cfg.eta0 <= 0.0) throw config_error("eta0 must be positive");
    if (cfg.alpha <= 0.0) throw config_error("alpha must be positive");
    if (cfg.replications < 1) throw config_error("replications must be >= 1");
    if (cfg.length < 1) throw config_error("length must be >= 1");
    if (cfg.burn_in < 0) throw config_error("burn_in must be >= 0");
    if (cfg.draws < 1) throw config_error("draws must be >= 1");
    if (cfg.bins < 2) throw config_error("bins must be >= 2");
    if (cfg.cases < 1) throw config_error("cases must be >= 1");
    if (cfg.mode != "matrix" && cfg.mode != "scalar" && cfg.mode != "known") {
        throw config_error("mode must be one of matrix, scalar, known");
    }
    if (cfg.format != "json" && cfg.format != "csv" && cfg.format != "both") {
        throw config_error("format must be one of json, csv, both");
    }
    if (cfg.example != "A" && cfg.example != "B" && cfg.example != "C" &&
        cfg.example != "gaussian") {
        throw config_error("example must be one of A, B, C, gaussian");
    }
    for (const auto& m : cfg.models) {
        if (m != "DLM1" && m != "DLM3") {
            throw config_error("unknown model '" + m + "' (DLM1 or DLM3)");
        }
    }
    if (!cfg.data.empty() && !std::filesystem::exists(cfg.data)) {
        throw config_error("data file does not exist: " + cfg.data);
    }
    if (cfg.w && cfg.discounts) {
        throw config_error("w and discounts are mutually exclusive");
    }
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::string section;
    int line_no = 0;

    using Handler = std::function<void(RunConfig&, Cursor&)>;
    static const std::map<std::pair<std::string, std::string>, Handler> keys = {
        {{"model", "family"},
         [](RunConfig& c, Cursor& cur) {
             const std::string name = parse_string(cur);
             const auto f = family_from_name(name);
             if (!f) cur.fail("unknown family '" + name + "' (LL, LT, LS)");
             c.family = *f;
         }},
        {{"model", "data"},
         [](RunConfig& c, Cursor& cur) { c.data = parse_string(cur); }},
        {{"model", "mode"},
         [](RunConfig& c, Cursor& cur) { c.mode = parse_string(cur); }},
        {{"model", "b"},
         [](RunConfig& c, Cursor& cur) { c.b = parse_matrix(cur); }},
        {{"model", "c"},
         [](RunConfig& c, Cursor& cur) { c.c = parse_matrix(cur); }},
        {{"model", "w"},
         [](RunConfig& c, Cursor& cur) { c.w = parse_matrix(cur); }},
        {{"model", "v"},
         [](RunConfig& c, Cursor& cur) { c.v = parse_matrix(cur); }},
        {{"model", "z"},
         [](RunConfig& c, Cursor& cur) { c.z = parse_matrix(cur); }},
        {{"model", "discounts"},
         [](RunConfig& c, Cursor& cur) { c.discounts = parse_vector(cur); }},
        {{"priors", "m0"},
         [](RunConfig& c, Cursor& cur) { c.m0 = parse_vector(cur); }},
        {{"priors", "p0"},
         [](RunConfig& c, Cursor& cur) { c.p0 = parse_matrix(cur); }},
        {{"priors", "v0"},
         [](RunConfig& c, Cursor& cur) { c.v0 = parse_matrix(cur); }},
        {{"priors", "eta0"},
         [](RunConfig& c, Cursor& cur) { c.eta0 = parse_number(cur); }},
        {{"priors", "k0"},
         [](RunConfig& c, Cursor& cur) { c.k0 = parse_matrix(cur); }},
        {{"priors", "alpha"},
         [](RunConfig& c, Cursor& cur) { c.alpha = parse_number(cur); }},
        {{"priors", "nu"},
         [](RunConfig& c, Cursor& cur) { c.nu = parse_number(cur); }},
        {{"priors", "s"},
         [](RunConfig& c, Cursor& cur) { c.s = parse_number(cur); }},
        {{"run", "replications"},
         [](RunConfig& c, Cursor& cur) {
             c.replications = static_cast<int>(parse_integer(cur));
         }},
        {{"run", "length"},
         [](RunConfig& c, Cursor& cur) {
             c.length = static_cast<int>(parse_integer(cur));
         }},
        {{"run", "seed"},
         [](RunConfig& c, Cursor& cur) {
             c.seed = static_cast<std::uint64_t>(parse_integer(cur));
         }},
        {{"run", "snapshots"},
         [](RunConfig& c, Cursor& cur) {
             const Vector v = parse_vector(cur);
             c.snapshots.clear();
             for (Index i = 0; i < v.size(); ++i) {
                 c.snapshots.push_back(static_cast<int>(v[i]));
             }
         }},
        {{"run", "burn_in"},
         [](RunConfig& c, Cursor& cur) {
             c.burn_in = static_cast<int>(parse_integer(cur));
         }},
        {{"run", "models"},
         [](RunConfig& c, Cursor& cur) {
             c.models = cur.word_list();
             cur.end();
         }},
        {{"run", "draws"},
         [](RunConfig& c, Cursor& cur) {
             c.draws = static_cast<int>(parse_integer(cur));
         }},
        {{"run", "bins"},
         [](RunConfig& c, Cursor& cur) {
             c.bins = static_cast<int>(parse_integer(cur));
         }},
        {{"run", "example"},
         [](RunConfig& c, Cursor& cur) { c.example = parse_string(cur); }},
        {{"run", "dof"},
         [](RunConfig& c, Cursor& cur) { c.dof = parse_number(cur); }},
        {{"run", "cases"},
         [](RunConfig& c, Cursor& cur) {
             c.cases = static_cast<int>(parse_integer(cur));
         }},
        {{"output", "path"},
         [](RunConfig& c, Cursor& cur) { c.path = parse_string(cur); }},
        {{"output", "format"},
         [](RunConfig& c, Cursor& cur) { c.format = parse_string(cur); }},
    };

    std::istringstream in(text);
    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::size_t hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') {
                throw config_error("unterminated section header", line_no, 1);
            }
            section = trim(line.substr(1, line.size() - 2));
            if (section != "model" && section != "priors" && section != "run" &&
                section != "output") {
                throw config_error("unknown section [" + section + "]", line_no,
                                   1);
            }
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw config_error("expected 'key = value'", line_no, 1);
        }
        const std::string key = trim(line.substr(0, eq));
        if (section.empty()) {
            throw config_error("key '" + key + "' outside any section", line_no,
                               1);
        }
        const auto it = keys.find({section, key});
        if (it == keys.end()) {
            throw config_error(
                "unknown key '" + key + "' in section [" + section + "]",
                line_no, 1);
        }
        Cursor cur{std::string_view(line).substr(eq + 1), line_no};
        try {
            it->second(cfg, cur);
        } catch (const config_error&) {
            throw;
        } catch (const error& e) {
            throw config_error(e.what(), line_no, 1);
        }
    }

    validate_config(cfg);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

namespace {

void write_vector(std::ostream& os, const Vector& v) {
    os << '[';
    for (Index i = 0; i < v.size(); ++i) {
        if (i) os << ", ";
        os << format_double(v[i]);
    }
    os << ']';
}

void write_matrix(std::ostream& os, const Matrix& m) {
    os << '[';
    for (Index i = 0; i < m.rows(); ++i) {
        if (i) os << ", ";
        os << '[';
        for (Index j = 0; j < m.cols(); ++j) {
            if (j) os << ", ";
            os << format_double(m(i, j));
        }
        os << ']';
    }
    os << ']';
}

}  // namespace

std::string serialize_config(const RunConfig& cfg) {
    std::ostringstream os;
    os << "[model]\n";
    if (cfg.family) os << "family = " << family_name(*cfg.family) << '\n';
    if (!cfg.data.empty()) os << "data = " << cfg.data << '\n';
    os << "mode = " << cfg.mode << '\n';
    auto mat = [&](const char* key, const std::optional<Matrix>& m) {
        if (m) {
            os << key << " = ";
            write_matrix(os, *m);
            os << '\n';
        }
    };
    mat("b", cfg.b);
    mat("c", cfg.c);
    mat("w", cfg.w);
    mat("v", cfg.v);
    mat("z", cfg.z);
    if (cfg.discounts) {
        os << "discounts = ";
        write_vector(os, *cfg.discounts);
        os << '\n';
    }
    os << "\n[priors]\n";
    if (cfg.m0) {
        os << "m0 = ";
        write_vector(os, *cfg.m0);
        os << '\n';
    }
    mat("p0", cfg.p0);
    mat("v0", cfg.v0);
    os << "eta0 = " << format_double(cfg.eta0) << '\n';
    mat("k0", cfg.k0);
    os << "alpha = " << format_double(cfg.alpha) << '\n';
    os << "nu = " << format_double(cfg.nu) << '\n';
    os << "s = " << format_double(cfg.s) << '\n';
    os << "\n[run]\n";
    os << "replications = " << cfg.replications << '\n';
    os << "length = " << cfg.length << '\n';
    os << "seed = " << cfg.seed << '\n';
    os << "snapshots = [";
    for (std::size_t i = 0; i < cfg.snapshots.size(); ++i) {
        if (i) os << ", ";
        os << cfg.snapshots[i];
    }
    os << "]\n";
    os << "burn_in = " << cfg.burn_in << '\n';
    os << "models = [";
    for (std::size_t i = 0; i < cfg.models.size(); ++i) {
        if (i) os << ", ";
        os << cfg.models[i];
    }
    os << "]\n";
    os << "draws = " << cfg.draws << '\n';
    os << "bins = " << cfg.bins << '\n';
    os << "example = " << cfg.example << '\n';
    os << "dof = " << format_double(cfg.dof) << '\n';
    os << "cases = " << cfg.cases << '\n';
    os << "\n[output]\n";
    if (!cfg.path.empty()) os << "path = " << cfg.path << '\n';
    os << "format = " << cfg.format << '\n';
    return os.str();
}

}  // namespace pspp
