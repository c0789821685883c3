#pragma once

#include <string>

namespace lapwave::cli {

struct FetchOptions {
    std::string dataset = "all";            // manifest name or "all"
    std::string data_dir = "data";
    std::string manifest = "data/datasets.json";
    bool verify_only = false;               // never touch the network
    bool force = false;                     // re-download even if cached
};

// Downloads, decompresses and verifies the benchmark datasets listed in the
// manifest. Returns a process exit code (0 ok, 1 on failure).
int run_fetch(const FetchOptions& opts);

} // namespace lapwave::cli
