#include "lapwave/archive.hpp"

#include <cstring>

#include <zlib.h>

namespace lapwave {

namespace {

std::vector<std::uint8_t> inflate_bytes(const std::uint8_t* data, std::size_t size,
                                        int window_bits, std::size_t size_hint) {
    z_stream zs{};
    if (inflateInit2(&zs, window_bits) != Z_OK)
        throw ParseError("zlib: inflateInit failed");
    std::vector<std::uint8_t> out;
    out.reserve(size_hint ? size_hint : size * 4);
    std::uint8_t buf[1 << 16];
    zs.next_in = const_cast<std::uint8_t*>(data);
    zs.avail_in = static_cast<uInt>(size);
    int rc = Z_OK;
    do {
        zs.next_out = buf;
        zs.avail_out = sizeof(buf);
        rc = inflate(&zs, Z_NO_FLUSH);
        if (rc != Z_OK && rc != Z_STREAM_END) {
            inflateEnd(&zs);
            throw ParseError(std::string("zlib: inflate failed: ") +
                             (zs.msg ? zs.msg : "corrupt stream"));
        }
        out.insert(out.end(), buf, buf + (sizeof(buf) - zs.avail_out));
    } while (rc != Z_STREAM_END && (zs.avail_in > 0 || zs.avail_out == 0));
    inflateEnd(&zs);
    if (rc != Z_STREAM_END)
        throw ParseError("zlib: truncated stream");
    return out;
}

std::uint32_t le32(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) |
           (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t le16(const std::uint8_t* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

} // namespace

std::vector<std::uint8_t> gunzip(const std::vector<std::uint8_t>& in) {
    if (in.size() < 18 || in[0] != 0x1f || in[1] != 0x8b)
        throw ParseError("not a gzip stream");
    // trailer holds the uncompressed size mod 2^32, use as a hint
    const std::size_t hint = le32(in.data() + in.size() - 4);
    return inflate_bytes(in.data(), in.size(), 15 + 16, hint);
}

std::vector<std::uint8_t> unzip_single(const std::vector<std::uint8_t>& in,
                                       const std::string& name_suffix) {
    constexpr std::uint32_t k_eocd = 0x06054b50;
    constexpr std::uint32_t k_central = 0x02014b50;
    constexpr std::uint32_t k_local = 0x04034b50;

    if (in.size() < 22)
        throw ParseError("zip: file too small");
    // end-of-central-directory record sits in the trailing 64 KiB
    std::size_t eocd = std::string::npos;
    const std::size_t lo = in.size() > (1 << 16) + 22 ? in.size() - (1 << 16) - 22 : 0;
    for (std::size_t i = in.size() - 22 + 1; i-- > lo;) {
        if (le32(in.data() + i) == k_eocd) {
            eocd = i;
            break;
        }
    }
    if (eocd == std::string::npos)
        throw ParseError("zip: no end-of-central-directory record");
    const std::uint16_t n_entries = le16(in.data() + eocd + 10);
    std::size_t pos = le32(in.data() + eocd + 16); // central directory offset

    for (std::uint16_t e = 0; e < n_entries; ++e) {
        if (pos + 46 > in.size() || le32(in.data() + pos) != k_central)
            throw ParseError("zip: corrupt central directory");
        const std::uint16_t method = le16(in.data() + pos + 10);
        const std::uint32_t want_crc = le32(in.data() + pos + 16);
        const std::uint32_t csize = le32(in.data() + pos + 20);
        const std::uint32_t usize = le32(in.data() + pos + 24);
        const std::uint16_t nlen = le16(in.data() + pos + 28);
        const std::uint16_t xlen = le16(in.data() + pos + 30);
        const std::uint16_t clen = le16(in.data() + pos + 32);
        const std::uint32_t lofs = le32(in.data() + pos + 42);
        const std::string name(reinterpret_cast<const char*>(in.data() + pos + 46), nlen);
        pos += 46u + nlen + xlen + clen;

        if (!name.empty() && name.back() == '/')
            continue; // directory entry
        if (!name_suffix.empty() &&
            (name.size() < name_suffix.size() ||
             name.compare(name.size() - name_suffix.size(), name_suffix.size(),
                          name_suffix) != 0))
            continue;

        if (lofs + 30 > in.size() || le32(in.data() + lofs) != k_local)
            throw ParseError("zip: corrupt local header for " + name);
        const std::uint16_t lnlen = le16(in.data() + lofs + 26);
        const std::uint16_t lxlen = le16(in.data() + lofs + 28);
        const std::size_t data_ofs = lofs + 30u + lnlen + lxlen;
        if (data_ofs + csize > in.size())
            throw ParseError("zip: truncated entry " + name);

        std::vector<std::uint8_t> out;
        if (method == 0) {
            if (csize != usize)
                throw ParseError("zip: stored entry with mismatched sizes");
            out.assign(in.begin() + data_ofs, in.begin() + data_ofs + csize);
        } else if (method == 8) {
            out = inflate_bytes(in.data() + data_ofs, csize, -15, usize);
        } else {
            throw ParseError("zip: unsupported compression method " +
                             std::to_string(method));
        }
        const auto got_crc = static_cast<std::uint32_t>(
            crc32(0, out.data(), static_cast<uInt>(out.size())));
        if (got_crc != want_crc)
            throw ParseError("zip: crc mismatch for " + name);
        return out;
    }
    throw ParseError("zip: no entry matching \"" + name_suffix + "\"");
}

} // namespace lapwave
