#include "kamtori/io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace kamtori {

namespace {

std::string strip(const std::string& line) {
    std::string s = line.substr(0, line.find('#'));
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

std::vector<int> parse_int_vector(const std::string& s, int expect) {
    std::vector<int> v;
    for (const std::string& part : split(s, ',')) {
        try {
            v.push_back(std::stoi(part));
        } catch (const std::exception&) {
            throw parse_error("bad exponent '" + part + "'");
        }
    }
    if (static_cast<int>(v.size()) != expect)
        throw parse_error("expected " + std::to_string(expect) +
                          " exponents, got " + std::to_string(v.size()));
    return v;
}

struct Header {
    int d = 0, N = 0, np = 0, pd = -1;
};

Header parse_header(const std::string& line) {
    Header h;
    std::stringstream ss(line);
    std::string word;
    ss >> word;  // "space"
    while (ss >> word) {
        auto eq = word.find('=');
        if (eq == std::string::npos)
            throw parse_error("bad header field '" + word + "'");
        std::string key = word.substr(0, eq);
        int val;
        try {
            val = std::stoi(word.substr(eq + 1));
        } catch (const std::exception&) {
            throw parse_error("bad header value in '" + word + "'");
        }
        if (key == "d")
            h.d = val;
        else if (key == "N")
            h.N = val;
        else if (key == "np")
            h.np = val;
        else if (key == "pd")
            h.pd = val;
        else
            throw parse_error("unknown header field '" + key + "'");
    }
    if (h.d <= 0 || h.N <= 0) throw parse_error("header must set d and N");
    return h;
}

struct Parsed {
    TruncatedSeries series;
    std::optional<std::vector<double>> omega;
};

Parsed parse_stream(std::istream& in) {
    std::string line;
    std::optional<SeriesSpace> space;
    std::optional<TruncatedSeries> series;
    std::optional<std::vector<double>> omega;
    while (std::getline(in, line)) {
        std::string s = strip(line);
        if (s.empty()) continue;
        if (s.rfind("space", 0) == 0) {
            if (space) throw parse_error("duplicate space header");
            Header h = parse_header(s);
            space.emplace(h.d, h.N, h.np, h.pd);
            series.emplace(*space);
            continue;
        }
        if (!space) throw parse_error("monomial line before space header");
        if (s.rfind("omega", 0) == 0) {
            std::vector<double> w;
            for (const std::string& part : split(strip(s.substr(5)), ',')) {
                try {
                    w.push_back(std::stod(part));
                } catch (const std::exception&) {
                    throw parse_error("bad omega entry '" + part + "'");
                }
            }
            if (static_cast<int>(w.size()) != space->dof)
                throw parse_error("omega dimension does not match d");
            omega = std::move(w);
            continue;
        }
        std::vector<std::string> blocks = split(s, '|');
        int expect_blocks = space->n_params > 0 ? 5 : 4;
        if (static_cast<int>(blocks.size()) != expect_blocks)
            throw parse_error("expected " + std::to_string(expect_blocks - 1) +
                              " '|'-separated blocks in '" + s + "'");
        std::vector<int> exps;
        for (int b = 0; b + 1 < expect_blocks; ++b) {
            int len = b < 3 ? space->dof : space->n_params;
            std::vector<int> v = parse_int_vector(strip(blocks[b]), len);
            exps.insert(exps.end(), v.begin(), v.end());
        }
        std::stringstream cs(blocks.back());
        double re, im;
        if (!(cs >> re >> im))
            throw parse_error("bad coefficient in '" + s + "'");
        series->add_to(pack_exponents(exps), Complex(re, im));
    }
    if (!series) throw parse_error("missing space header");
    return {std::move(*series), std::move(omega)};
}

void write_body(std::ostream& out, const TruncatedSeries& f) {
    const SeriesSpace& sp = f.space();
    out << "space d=" << sp.dof << " N=" << sp.max_degree;
    if (sp.n_params > 0)
        out << " np=" << sp.n_params << " pd=" << sp.param_degree;
    out << "\n";
    std::map<MonoKey, Complex> sorted(f.coeffs().begin(), f.coeffs().end());
    char buf[64];
    for (const auto& [key, c] : sorted) {
        std::vector<int> e = unpack_exponents(key, sp.n_vars());
        auto emit_block = [&](int from, int len) {
            for (int i = 0; i < len; ++i)
                out << (i ? "," : "") << e[from + i];
        };
        emit_block(0, sp.dof);
        out << " | ";
        emit_block(sp.dof, sp.dof);
        out << " | ";
        emit_block(2 * sp.dof, sp.dof);
        if (sp.n_params > 0) {
            out << " | ";
            emit_block(3 * sp.dof, sp.n_params);
        }
        std::snprintf(buf, sizeof buf, " | %.17g %.17g\n", c.real(), c.imag());
        out << buf;
    }
}

}  // namespace

TruncatedSeries read_series(std::istream& in) {
    return parse_stream(in).series;
}

TruncatedSeries read_series_string(const std::string& text) {
    std::stringstream ss(text);
    return read_series(ss);
}

void write_series(std::ostream& out, const TruncatedSeries& f) {
    write_body(out, f);
}

std::string write_series_string(const TruncatedSeries& f) {
    std::stringstream ss;
    write_series(ss, f);
    return ss.str();
}

HamiltonianFile read_hamiltonian(std::istream& in) {
    Parsed p = parse_stream(in);
    if (!p.omega) throw parse_error("Hamiltonian file must set omega");
    return {std::move(p.series), std::move(*p.omega)};
}

HamiltonianFile read_hamiltonian_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open '" + path + "'");
    return read_hamiltonian(in);
}

void write_hamiltonian(std::ostream& out, const HamiltonianFile& h) {
    const SeriesSpace& sp = h.hamiltonian.space();
    out << "space d=" << sp.dof << " N=" << sp.max_degree;
    if (sp.n_params > 0)
        out << " np=" << sp.n_params << " pd=" << sp.param_degree;
    out << "\n";
    char buf[32];
    out << "omega ";
    for (std::size_t i = 0; i < h.omega.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", h.omega[i]);
        out << (i ? "," : "") << buf;
    }
    out << "\n";
    std::stringstream body;
    write_body(body, h.hamiltonian);
    std::string b = body.str();
    out << b.substr(b.find('\n') + 1);
}

}  // namespace kamtori
