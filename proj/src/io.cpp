#include "crmimo/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace crmimo {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

double parse_num(const std::string& s, const char* what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error(std::string("bad numeric field in ") + what + ": '" + s + "'");
    }
}

}  // namespace

std::string fmt_num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

FadingEnsemble load_ensemble_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open ensemble file: " + path);
    std::string line;
    int n_rx = 0, n_tx = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (std::sscanf(line.c_str(), "n_rx=%d,n_tx=%d", &n_rx, &n_tx) != 2)
            throw std::runtime_error("ensemble file must start with 'n_rx=R,n_tx=T': " + path);
        break;
    }
    if (n_rx < 1 || n_tx < 1) throw std::runtime_error("ensemble file has bad dimensions: " + path);
    std::vector<ChannelState> states;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto fields = split_csv_line(line);
        if (static_cast<int>(fields.size()) != 2 * n_rx * n_tx)
            throw std::runtime_error("ensemble row has wrong field count: " + path);
        CMat g(n_rx, n_tx);
        int k = 0;
        for (int r = 0; r < n_rx; ++r)
            for (int c = 0; c < n_tx; ++c) {
                const double re = parse_num(fields[static_cast<std::size_t>(k)], "ensemble");
                const double im = parse_num(fields[static_cast<std::size_t>(k + 1)], "ensemble");
                g(r, c) = {re, im};
                k += 2;
            }
        states.emplace_back(std::move(g));
    }
    if (states.empty()) throw std::runtime_error("ensemble file has no states: " + path);
    return FadingEnsemble::empirical(std::move(states));
}

void save_ensemble_csv(const std::string& path, const std::vector<ChannelState>& states) {
    if (states.empty()) throw std::invalid_argument("save_ensemble_csv: no states");
    std::ostringstream out;
    out << "n_rx=" << states.front().n_rx() << ",n_tx=" << states.front().n_tx() << "\n";
    for (const auto& s : states) {
        bool first = true;
        for (int r = 0; r < s.n_rx(); ++r)
            for (int c = 0; c < s.n_tx(); ++c) {
                if (!first) out << ",";
                out << fmt_num(s.entries(r, c).real()) << "," << fmt_num(s.entries(r, c).imag());
                first = false;
            }
        out << "\n";
    }
    write_text_file(path, out.str());
}

JointSource load_source_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open source file: " + path);
    std::string line;
    std::vector<std::string> y_labels;
    std::vector<std::string> x_labels;
    std::vector<std::vector<double>> rows;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto fields = split_csv_line(line);
        if (!have_header) {
            if (fields.size() < 2) throw std::runtime_error("source header too short: " + path);
            y_labels.assign(fields.begin() + 1, fields.end());
            have_header = true;
            continue;
        }
        if (fields.size() != y_labels.size() + 1)
            throw std::runtime_error("source row has wrong field count: " + path);
        x_labels.push_back(fields[0]);
        std::vector<double> row;
        for (std::size_t i = 1; i < fields.size(); ++i) row.push_back(parse_num(fields[i], "source"));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error("source file has no rows: " + path);
    Eigen::MatrixXd pmf(rows.size(), y_labels.size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < y_labels.size(); ++c)
            pmf(static_cast<int>(r), static_cast<int>(c)) = rows[r][c];
    return JointSource(pmf, std::move(x_labels), std::move(y_labels));
}

void save_source_csv(const std::string& path, const JointSource& source) {
    std::ostringstream out;
    for (const auto& y : source.y_labels()) out << "," << y;
    out << "\n";
    for (int r = 0; r < source.nx(); ++r) {
        out << source.x_labels()[static_cast<std::size_t>(r)];
        for (int c = 0; c < source.ny(); ++c) out << "," << fmt_num(source.pmf()(r, c));
        out << "\n";
    }
    write_text_file(path, out.str());
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace crmimo
