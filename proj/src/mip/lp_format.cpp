#include "lvdsm/mip/lp_format.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lvdsm::mip {

namespace {

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string lp_name(const std::string& raw, const char* fallback, int index)
{
    if (raw.empty()) return fallback + std::to_string(index);
    std::string out;
    for (char ch : raw) {
        const bool bad = ch == ' ' || ch == '+' || ch == '-' || ch == '*' || ch == '/' || ch == '<' || ch == '>' ||
                         ch == '=' || ch == ':' || ch == '\\' || ch == '[' || ch == ']' || ch == '^';
        out.push_back(bad ? '_' : ch);
    }
    const char first = out.front();
    if (first == '$' || first == '.' || (first >= '0' && first <= '9') || first == 'e' || first == 'E') out.insert(0, "_");
    return out;
}

// Wraps long expressions; LP readers limit line length.
class LineWriter {
public:
    explicit LineWriter(std::ostream& out) : out_(out) {}
    void put(const std::string& tok)
    {
        if (width_ + tok.size() + 1 > 200) {
            out_ << "\n   ";
            width_ = 3;
        }
        out_ << ' ' << tok;
        width_ += tok.size() + 1;
    }
    void end()
    {
        out_ << '\n';
        width_ = 0;
    }

private:
    std::ostream& out_;
    std::size_t width_ = 0;
};

void write_terms(LineWriter& w, const std::vector<Term>& terms, const std::vector<std::string>& names)
{
    if (terms.empty()) {
        w.put("0");
        w.put(names.empty() ? "x" : names[0]);
        return;
    }
    bool first = true;
    for (const Term& t : terms) {
        if (t.coef == 0.0) continue;
        const double a = std::abs(t.coef);
        const char* sign = t.coef < 0 ? "-" : (first ? "" : "+");
        if (*sign) w.put(sign);
        w.put(num(a));
        w.put(names[t.var]);
        first = false;
    }
    if (first) {
        w.put("0");
        w.put(names[terms[0].var]);
    }
}

}  // namespace

std::string lp_identifier(const std::string& raw) { return lp_name(raw, "x", 0); }

void write_lp(const Problem& p, std::ostream& out)
{
    std::vector<std::string> vnames(p.variable_count());
    for (int j = 0; j < p.variable_count(); ++j) vnames[j] = lp_name(p.variables[j].name, "x", j);

    out << "\\ " << p.variable_count() << " columns, " << p.constraint_count() << " rows, " << p.integer_count()
        << " integer\n";
    out << "Minimize\n obj:";
    LineWriter w(out);
    std::vector<Term> obj;
    for (int j = 0; j < p.variable_count(); ++j)
        if (p.objective[j] != 0.0) obj.push_back({j, p.objective[j]});
    if (obj.empty() && p.variable_count() > 0) obj.push_back({0, 0.0});
    if (!obj.empty()) write_terms(w, obj, vnames);
    if (p.objective_offset != 0.0) {
        w.put(p.objective_offset < 0 ? "-" : "+");
        w.put(num(std::abs(p.objective_offset)));
    }
    w.end();

    out << "Subject To\n";
    for (int i = 0; i < p.constraint_count(); ++i) {
        const Constraint& c = p.constraints[i];
        const std::string name = lp_name(c.name, "c", i);
        const bool has_lo = std::isfinite(c.lower);
        const bool has_up = std::isfinite(c.upper);
        if (!has_lo && !has_up) continue;
        if (has_lo && has_up && c.lower == c.upper) {
            out << ' ' << name << ':';
            write_terms(w, c.terms, vnames);
            w.put("=");
            w.put(num(c.lower));
            w.end();
            continue;
        }
        if (has_lo) {
            out << ' ' << name << (has_up ? "_lo" : "") << ':';
            write_terms(w, c.terms, vnames);
            w.put(">=");
            w.put(num(c.lower));
            w.end();
        }
        if (has_up) {
            out << ' ' << name << (has_lo ? "_hi" : "") << ':';
            write_terms(w, c.terms, vnames);
            w.put("<=");
            w.put(num(c.upper));
            w.end();
        }
    }

    out << "Bounds\n";
    for (int j = 0; j < p.variable_count(); ++j) {
        const Variable& v = p.variables[j];
        const bool lo_inf = !std::isfinite(v.lower);
        const bool up_inf = !std::isfinite(v.upper);
        if (lo_inf && up_inf) out << ' ' << vnames[j] << " free\n";
        else if (v.lower == v.upper) out << ' ' << vnames[j] << " = " << num(v.lower) << '\n';
        else if (up_inf) {
            if (v.lower != 0.0) out << ' ' << vnames[j] << " >= " << num(v.lower) << '\n';
        } else {
            out << ' ' << (lo_inf ? std::string("-inf") : num(v.lower)) << " <= " << vnames[j] << " <= " << num(v.upper)
                << '\n';
        }
    }

    bool any_bin = false, any_gen = false;
    for (const Variable& v : p.variables) {
        if (!v.integer) continue;
        if (v.lower == 0.0 && v.upper == 1.0) any_bin = true;
        else any_gen = true;
    }
    if (any_bin) {
        out << "Binaries\n";
        for (int j = 0; j < p.variable_count(); ++j) {
            const Variable& v = p.variables[j];
            if (v.integer && v.lower == 0.0 && v.upper == 1.0) out << ' ' << vnames[j] << '\n';
        }
    }
    if (any_gen) {
        out << "Generals\n";
        for (int j = 0; j < p.variable_count(); ++j) {
            const Variable& v = p.variables[j];
            if (v.integer && !(v.lower == 0.0 && v.upper == 1.0)) out << ' ' << vnames[j] << '\n';
        }
    }
    out << "End\n";
}

void write_lp_file(const Problem& problem, const std::string& path)
{
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    write_lp(problem, f);
    if (!f) throw std::runtime_error("write failed: " + path);
}

std::unordered_map<std::string, double> read_solution(std::istream& in)
{
    std::unordered_map<std::string, double> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ss(line);
        std::string name;
        double value;
        if (!(ss >> name >> value)) throw std::runtime_error("solution line " + std::to_string(lineno) + " malformed");
        out[name] = value;
    }
    return out;
}

std::unordered_map<std::string, double> read_solution_file(const std::string& path)
{
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read " + path);
    return read_solution(f);
}

}  // namespace lvdsm::mip
