#include "fetch.hpp"

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "httplib.h"
#include "json.hpp"

#ifdef CPPHTTPLIB_OPENSSL_SUPPORT
#include <openssl/evp.h>
#endif

#include "lapwave/archive.hpp"
#include "lapwave/errors.hpp"
#include "lapwave/graph.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace lapwave::cli {
namespace {

struct DatasetEntry {
    std::string name;
    std::string file;
    bool committed = false;
    std::string url;
    std::string archive;                // "none", "gzip", "zip"
    std::string member_suffix;          // zip only
    std::optional<std::string> sha256;  // pinned hash of the extracted file
    long long nodes = -1, edges = -1;   // raw graph, -1 = unchecked
    long long lcc_nodes = -1, lcc_edges = -1;
};

std::vector<DatasetEntry> load_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open manifest " + path.string());
    json doc = json::parse(in);
    std::vector<DatasetEntry> out;
    for (const auto& j : doc.at("datasets")) {
        DatasetEntry e;
        e.name = j.at("name").get<std::string>();
        e.file = j.at("file").get<std::string>();
        e.committed = j.value("committed", false);
        e.url = j.value("url", std::string{});
        e.archive = j.value("archive", std::string{"none"});
        e.member_suffix = j.value("archive_member_suffix", std::string{});
        if (j.contains("sha256") && !j["sha256"].is_null())
            e.sha256 = j["sha256"].get<std::string>();
        e.nodes = j.value("nodes", -1LL);
        e.edges = j.value("edges", -1LL);
        e.lcc_nodes = j.value("lcc_nodes", -1LL);
        e.lcc_edges = j.value("lcc_edges", -1LL);
        out.push_back(std::move(e));
    }
    return out;
}

#ifdef CPPHTTPLIB_OPENSSL_SUPPORT
std::string sha256_hex(const std::vector<std::uint8_t>& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    EVP_DigestUpdate(ctx, data.data(), data.size());
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);
    std::string hex(2 * len, '0');
    for (unsigned int i = 0; i < len; ++i)
        std::snprintf(hex.data() + 2 * i, 3, "%02x", digest[i]);
    return hex;
}
#else
std::string sha256_hex(const std::vector<std::uint8_t>&) { return {}; }
#endif

std::vector<std::uint8_t> read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ParseError("cannot open " + path.string());
    std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
    return data;
}

std::vector<std::uint8_t> download(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw ConfigError("malformed url: " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    const std::string base = path_start == std::string::npos ? url : url.substr(0, path_start);
    const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
    if (base.rfind("https", 0) == 0)
        throw ConfigError("built without TLS support, cannot fetch " + url);
#endif
    httplib::Client cli(base);
    cli.set_connection_timeout(15, 0);
    cli.set_read_timeout(120, 0);
    cli.set_follow_location(true);
    auto res = cli.Get(path);
    if (!res)
        throw ConfigError("download failed for " + url + " (" +
                          httplib::to_string(res.error()) +
                          "); check network access or place the file manually");
    if (res->status != 200)
        throw ConfigError("download failed for " + url + " (HTTP " +
                          std::to_string(res->status) + ")");
    return {res->body.begin(), res->body.end()};
}

std::vector<std::uint8_t> extract(const DatasetEntry& e, std::vector<std::uint8_t> raw) {
    if (e.archive == "none")
        return raw;
    if (e.archive == "gzip")
        return gunzip(raw);
    if (e.archive == "zip")
        return unzip_single(raw, e.member_suffix);
    throw ConfigError("unknown archive kind '" + e.archive + "' for " + e.name);
}

// Structural check: the counts are what downstream experiments key on, so a
// silently truncated or re-released file fails loudly here.
bool verify_counts(const DatasetEntry& e, const fs::path& path, std::string& msg) {
    Graph g = load_graph_file(path);
    std::ostringstream os;
    bool ok = true;
    os << "n=" << g.n() << " m=" << g.m();
    if (e.nodes >= 0 && (g.n() != e.nodes || static_cast<long long>(g.m()) != e.edges)) {
        os << " (expected n=" << e.nodes << " m=" << e.edges << ")";
        ok = false;
    }
    if (e.lcc_nodes >= 0) {
        Graph lcc = largest_connected_component(g);
        os << ", lcc n=" << lcc.n() << " m=" << lcc.m();
        if (lcc.n() != e.lcc_nodes || static_cast<long long>(lcc.m()) != e.lcc_edges) {
            os << " (expected n=" << e.lcc_nodes << " m=" << e.lcc_edges << ")";
            ok = false;
        }
    }
    msg = os.str();
    return ok;
}

bool verify_checksum(const DatasetEntry& e, const std::vector<std::uint8_t>& data,
                     std::string& msg) {
    const std::string hex = sha256_hex(data);
    if (hex.empty()) {
        msg = "sha256 unavailable (built without OpenSSL)";
        return true;
    }
    if (!e.sha256) {
        msg = "sha256 " + hex + " (not pinned in manifest)";
        return true;
    }
    if (hex == *e.sha256) {
        msg = "sha256 ok";
        return true;
    }
    msg = "sha256 mismatch: got " + hex + ", manifest pins " + *e.sha256;
    return false;
}

// One dataset: ensure the extracted file exists at data_dir/file, then verify
// checksum and structural counts. Returns false on any failure.
bool process(const DatasetEntry& e, const FetchOptions& opts) {
    const fs::path target = fs::path(opts.data_dir) / e.file;
    const bool present = fs::exists(target);

    if (!present || (opts.force && !e.committed)) {
        if (opts.verify_only) {
            if (!present) {
                std::cerr << e.name << ": missing " << target.string()
                          << " (run fetch without --verify-only)\n";
                return false;
            }
        } else if (e.committed) {
            if (!present) {
                std::cerr << e.name << ": committed dataset missing at "
                          << target.string() << "\n";
                return false;
            }
        } else {
            std::cout << e.name << ": fetching " << e.url << "\n";
            auto data = extract(e, download(e.url));
            fs::create_directories(target.parent_path().empty() ? "." : target.parent_path());
            std::ofstream out(target, std::ios::binary);
            out.write(reinterpret_cast<const char*>(data.data()),
                      static_cast<std::streamsize>(data.size()));
            if (!out)
                throw ParseError("write failed for " + target.string());
            std::cout << e.name << ": wrote " << target.string() << " (" << data.size()
                      << " bytes)\n";
        }
    }

    const auto data = read_file(target);
    std::string cmsg, smsg;
    const bool cok = verify_checksum(e, data, cmsg);
    const bool sok = verify_counts(e, target, smsg);
    std::cout << e.name << ": " << cmsg << "; " << smsg
              << (cok && sok ? " [ok]" : " [FAILED]") << "\n";
    return cok && sok;
}

} // namespace

int run_fetch(const FetchOptions& opts) {
    const auto entries = load_manifest(opts.manifest);
    std::vector<const DatasetEntry*> selected;
    for (const auto& e : entries)
        if (opts.dataset == "all" || opts.dataset == e.name)
            selected.push_back(&e);
    if (selected.empty()) {
        std::cerr << "unknown dataset '" << opts.dataset << "'; manifest lists:";
        for (const auto& e : entries)
            std::cerr << " " << e.name;
        std::cerr << "\n";
        return 1;
    }
    bool all_ok = true;
    for (const auto* e : selected) {
        try {
            all_ok = process(*e, opts) && all_ok;
        } catch (const std::exception& ex) {
            std::cerr << e->name << ": " << ex.what() << "\n";
            all_ok = false;
        }
    }
    return all_ok ? 0 : 1;
}

} // namespace lapwave::cli
