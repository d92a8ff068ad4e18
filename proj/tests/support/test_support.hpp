#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace cjtrans::testing {

inline std::string data_path(const std::string& name) {
    return std::string(CJTRANS_TEST_DATA) + "/" + name;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::mt19937_64 rng(std::random_device{}());
        path_ = std::filesystem::temp_directory_path() / ("cjtrans-test-" + std::to_string(rng()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::string str(const std::string& child = {}) const {
        return child.empty() ? path_.string() : (path_ / child).string();
    }

private:
    std::filesystem::path path_;
};

/// Random but mostly well-formed Java: classes, methods, and nested control
/// flow. Used for fuzzing summary invariants.
class RandomJava {
public:
    explicit RandomJava(std::uint64_t seed) : rng_(seed) {}

    std::string program() {
        std::string out;
        const int classes = pick(1, 2);
        for (int c = 0; c < classes; ++c) {
            out += "class K" + std::to_string(c) + " {\n";
            const int members = pick(0, 3);
            for (int m = 0; m < members; ++m) out += method(1);
            out += "}\n";
        }
        return out;
    }

    /// A program with a few random byte edits, usually malformed.
    std::string mutated() {
        auto src = program();
        static constexpr char alphabet[] = "{}();=+x \n\"";
        const int edits = pick(1, 4);
        for (int e = 0; e < edits && !src.empty(); ++e) {
            const auto pos = static_cast<std::size_t>(pick(0, static_cast<int>(src.size()) - 1));
            switch (pick(0, 2)) {
            case 0: src.erase(pos, 1); break;
            case 1: src.insert(pos, 1, alphabet[pick(0, sizeof(alphabet) - 2)]); break;
            default: src[pos] = alphabet[pick(0, sizeof(alphabet) - 2)]; break;
            }
        }
        return src;
    }

private:
    int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

    std::string method(int depth) {
        std::string out = "  int m" + std::to_string(pick(0, 99)) + "(int a, int b) {\n";
        out += statements(depth, 3);
        out += "    return a;\n  }\n";
        return out;
    }

    std::string statements(int depth, int max) {
        std::string out;
        const int n = pick(0, max);
        for (int i = 0; i < n; ++i) out += statement(depth);
        return out;
    }

    std::string statement(int depth) {
        const int kind = depth > 3 ? 0 : pick(0, 8);
        switch (kind) {
        case 1: return "if (a > b) {\n" + statements(depth + 1, 2) + "} else {\n" + statements(depth + 1, 2) + "}\n";
        case 2: return "for (int i = 0; i < a; i++) {\n" + statements(depth + 1, 2) + "}\n";
        case 3: return "while (a < b) {\n a++;\n" + statements(depth + 1, 1) + "}\n";
        case 4: return "do { b--; } while (b > 0);\n";
        case 5: return "try {\n" + statements(depth + 1, 2) + "} catch (Exception e) {\n throw new RuntimeException(e);\n}\n";
        case 6: return "java.util.function.IntUnaryOperator f = x -> x + " + std::to_string(pick(0, 9)) + ";\n";
        case 7: return "switch (a) { case 1: b = 2; break; default: b = 3; }\n";
        case 8: return "for (int v : new int[]{1, 2}) { a += v; }\n";
        default: return "a = a + " + std::to_string(pick(0, 9)) + ";\n";
        }
    }

    std::mt19937_64 rng_;
};

} // namespace cjtrans::testing
