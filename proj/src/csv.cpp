#include "ivlate/csv.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <system_error>
#include <vector>

#include "ivlate/rng.hpp"

namespace ivlate::csv {

std::string format_double(double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

void write_production_sample(std::ostream& out, const sim::ObservationalSample& sample) {
    out << "y_obs,x_obs,v,log_w\n";
    for (std::size_t i = 0; i < sample.size(); ++i) {
        out << format_double(sample.y_obs[i]) << ',' << format_double(sample.x_obs[i]) << ','
            << format_double(sample.v[i]) << ',' << format_double(sample.log_w[i]) << '\n';
    }
}

void write_trial_sample(std::ostream& out, const sim::TrialSample& sample) {
    out << "z,d,y\n";
    for (std::size_t i = 0; i < sample.size(); ++i) {
        out << (sample.z[i] ? '1' : '0') << ',' << (sample.d[i] ? '1' : '0') << ','
            << format_double(sample.y[i]) << '\n';
    }
}

void write_draws(std::ostream& out, const bayes::PosteriorDraws& draws) {
    out << "pi_a,pi_n,pi_c,p_a1,p_n0,p_c1,p_c0\n";
    for (const auto& row : draws.rows) {
        for (std::size_t j = 0; j < bayes::kDrawDim; ++j) {
            if (j > 0) out << ',';
            out << format_double(row[j]);
        }
        out << '\n';
    }
}

void write_sensitivity(std::ostream& out, const decide::SensitivityTable& table) {
    out << "m_a0,m_n1,D,action\n";
    for (const auto& row : table.rows) {
        out << format_double(row.m_a0) << ',' << format_double(row.m_n1) << ','
            << format_double(row.gain) << ',' << decide::to_string(row.action) << '\n';
    }
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

double parse_double(std::string_view field, std::size_t line_no) {
    double value = 0.0;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
    if (res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
        throw IoError("line " + std::to_string(line_no) + ": not a number: '" +
                      std::string(field) + "'");
    }
    return value;
}

std::uint8_t parse_bit(std::string_view field, std::size_t line_no) {
    if (field == "0") return 0;
    if (field == "1") return 1;
    throw IoError("line " + std::to_string(line_no) + ": expected 0 or 1, got '" +
                  std::string(field) + "'");
}

// Strips one trailing \r so files written on Windows parse the same.
std::string_view trim_cr(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
}

void expect_header(std::istream& in, std::string_view expected) {
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty file, expected header");
    if (trim_cr(line) != expected) {
        throw IoError("line 1: expected header '" + std::string(expected) + "', got '" + line +
                      "'");
    }
}

}  // namespace

sim::TrialSample read_trial_sample(std::istream& in) {
    expect_header(in, "z,d,y");
    sim::TrialSample sample;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view body = trim_cr(line);
        if (body.empty()) continue;
        const auto fields = split_fields(body);
        if (fields.size() != 3) {
            throw IoError("line " + std::to_string(line_no) + ": expected 3 fields, got " +
                          std::to_string(fields.size()));
        }
        sample.z.push_back(parse_bit(fields[0], line_no));
        sample.d.push_back(parse_bit(fields[1], line_no));
        sample.y.push_back(parse_double(fields[2], line_no));
    }
    return sample;
}

bayes::PosteriorDraws read_draws(std::istream& in) {
    expect_header(in, "pi_a,pi_n,pi_c,p_a1,p_n0,p_c1,p_c0");
    bayes::PosteriorDraws draws;
    std::string line;
    std::size_t line_no = 1;
    std::uint64_t digest = 0x3c6ef372fe94f82bULL;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view body = trim_cr(line);
        if (body.empty()) continue;
        const auto fields = split_fields(body);
        if (fields.size() != bayes::kDrawDim) {
            throw IoError("line " + std::to_string(line_no) + ": expected " +
                          std::to_string(bayes::kDrawDim) + " fields, got " +
                          std::to_string(fields.size()));
        }
        std::array<double, bayes::kDrawDim> row;
        for (std::size_t j = 0; j < bayes::kDrawDim; ++j) {
            row[j] = parse_double(fields[j], line_no);
            digest = splitmix64(digest + std::bit_cast<std::uint64_t>(row[j]));
        }
        draws.rows.push_back(row);
    }
    draws.provenance.data_digest = digest;
    return draws;
}

}  // namespace ivlate::csv
