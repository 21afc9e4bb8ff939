#pragma once
// Command-line front end.

#include <iosfwd>
#include <string>
#include <vector>

#include "sps/reconstruct.hpp"

namespace sps::cli {

enum ExitCode { kOk = 0, kFailed = 1, kUsage = 2, kInternal = 3 };

struct GenerateParams {
    int n = 8, d = 4, rank = 8;
    uint32_t q = 13;
    int ext = 0;  // 0: smallest degree reaching 2^ext_bits
    int ext_bits = 20;
    std::string mode = "general";
    int count = 1;
    uint64_t seed = 1;
    std::string out = ".";
};

struct ReconstructParams {
    std::string in;
    std::string algo = "auto";
    ReconstructionConfig cfg;
    uint64_t seed = 1;
    std::string out;     // circuit written here on success
    std::string report;  // JSON line appended here; stdout when empty
};

struct VerifyParams {
    std::string a, b;
    int trials = 40;
    uint64_t seed = 1;
};

int cmd_generate(const GenerateParams& p, std::ostream& log);
int cmd_reconstruct(const ReconstructParams& p, std::ostream& log);
int cmd_verify(const VerifyParams& p, std::ostream& log);

// parses argv (CLI11) and dispatches
int run(int argc, const char* const* argv, std::ostream& log);

}  // namespace sps::cli
