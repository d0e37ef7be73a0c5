#pragma once

// RAII scratch directory for IO and CLI tests.

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace testsupport {

class TempDir {
public:
    TempDir() {
        static std::atomic<unsigned> counter{0};
        const auto base = std::filesystem::temp_directory_path();
        for (unsigned attempt = 0; attempt < 100; ++attempt) {
            auto candidate =
                base / ("modecoupler-test-" + std::to_string(counter.fetch_add(1)) + "-" +
                        std::to_string(static_cast<unsigned>(attempt)));
            std::error_code ec;
            if (std::filesystem::create_directory(candidate, ec)) {
                path_ = candidate;
                return;
            }
        }
        throw std::runtime_error("could not create scratch directory");
    }

    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }

    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

    std::string file(const std::string& name) const { return (path_ / name).string(); }

    std::string write(const std::string& name, const std::string& text) const {
        const auto full = file(name);
        std::ofstream out(full, std::ios::binary);
        out << text;
        return full;
    }

    static std::string slurp(const std::string& full_path) {
        std::ifstream in(full_path, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    }

private:
    std::filesystem::path path_;
};

}  // namespace testsupport
