#pragma once

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace testutil {

namespace fs = std::filesystem;

// Monte Carlo standard error of a chain mean via batch means, robust to
// autocorrelation.
inline double batch_means_se(const std::vector<double>& x) {
    const std::size_t n = x.size();
    const std::size_t n_batches = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
    const std::size_t batch = n / n_batches;
    std::vector<double> means;
    means.reserve(n_batches);
    for (std::size_t b = 0; b < n_batches; ++b) {
        double s = 0.0;
        for (std::size_t i = b * batch; i < (b + 1) * batch; ++i) s += x[i];
        means.push_back(s / static_cast<double>(batch));
    }
    double grand = 0.0;
    for (double m : means) grand += m;
    grand /= static_cast<double>(n_batches);
    double var = 0.0;
    for (double m : means) var += (m - grand) * (m - grand);
    var /= static_cast<double>(n_batches - 1);
    return std::sqrt(var / static_cast<double>(n_batches));
}

inline double mean_of(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

inline double sd_of(const std::vector<double>& x) {
    const double m = mean_of(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return std::sqrt(s / static_cast<double>(x.size() - 1));
}

// Scratch directory removed on scope exit.
struct TempDir {
    fs::path path;

    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path = fs::temp_directory_path() /
               (tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
};

inline void write_text(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    out << content;
}

inline std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
}

#ifdef IVLATE_CLI_PATH
// Runs the CLI with stdout/stderr captured into files under dir; returns the
// process exit code.
inline int run_cli(const std::string& args, const fs::path& dir, std::string* out = nullptr,
                   std::string* err = nullptr) {
    const fs::path out_file = dir / "stdout.txt";
    const fs::path err_file = dir / "stderr.txt";
    const std::string cmd = std::string(IVLATE_CLI_PATH) + " " + args + " > " +
                            out_file.string() + " 2> " + err_file.string();
    const int status = std::system(cmd.c_str());
    if (out != nullptr) *out = slurp(out_file);
    if (err != nullptr) *err = slurp(err_file);
    if (status == -1) return -1;
    return WEXITSTATUS(status);
}
#endif

}  // namespace testutil
