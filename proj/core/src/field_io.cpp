#include "pcnls/field_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "pcnls/errors.hpp"

namespace pcnls {

namespace {

constexpr char kMagic[4] = {'N', 'L', 'S', 'F'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<std::uint8_t>(bits >> (8 * b)));
}

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::uint32_t u32() {
        need(4, "header");
        std::uint32_t v = 0;
        for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(bytes_[pos_++]) << (8 * b);
        return v;
    }

    double f64() {
        need(8, "header");
        std::uint64_t v = 0;
        for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(bytes_[pos_++]) << (8 * b);
        return std::bit_cast<double>(v);
    }

    void need(std::size_t n, const char* what) const {
        if (pos_ + n > bytes_.size()) {
            std::ostringstream msg;
            msg << "field file: truncated " << what << " (need " << pos_ + n << " bytes, have "
                << bytes_.size() << ")";
            throw FormatError(msg.str());
        }
    }

    std::size_t position() const { return pos_; }
    std::size_t remaining() const { return bytes_.size() - pos_; }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_field(const Field& u) {
    const GridSpec& g = u.grid();
    std::vector<std::uint8_t> out;
    out.reserve(16 + 12 * static_cast<std::size_t>(g.dims()) + 8 * u.size());
    out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
    put_u32(out, kFieldFormatVersion);
    put_u32(out, static_cast<std::uint32_t>(g.dims()));
    put_u32(out, static_cast<std::uint32_t>(g.confined_dims()));
    for (const Axis& a : g.axes()) {
        put_u32(out, static_cast<std::uint32_t>(a.points));
        put_f64(out, a.half_width);
    }
    for (double v : u.values()) put_f64(out, v);
    return out;
}

Field decode_field(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
        throw FormatError("field file: bad magic (expected NLSF)");
    }
    Reader in(bytes.subspan(4));
    const std::uint32_t version = in.u32();
    if (version != kFieldFormatVersion) {
        throw FormatError("field file: unsupported version " + std::to_string(version));
    }
    const std::uint32_t n = in.u32();
    const std::uint32_t m = in.u32();
    if (n < 2 || n > 64) throw FormatError("field file: implausible dimension count");
    std::vector<double> widths;
    std::vector<std::size_t> points;
    for (std::uint32_t a = 0; a < n; ++a) {
        points.push_back(in.u32());
        widths.push_back(in.f64());
    }
    GridSpec grid = [&] {
        try {
            return GridSpec::build(static_cast<int>(n), static_cast<int>(m), widths, points);
        } catch (const ValidationError& e) {
            throw FormatError(std::string("field file: invalid grid header: ") + e.what());
        }
    }();
    const std::size_t expected = 8 * grid.size();
    if (in.remaining() != expected) {
        std::ostringstream msg;
        msg << "field file: payload length mismatch (expected " << expected << " bytes, got "
            << in.remaining() << ")";
        throw FormatError(msg.str());
    }
    std::vector<double> values(grid.size());
    for (double& v : values) v = in.f64();
    try {
        return Field(std::move(grid), std::move(values));
    } catch (const ValidationError& e) {
        throw FormatError(std::string("field file: ") + e.what());
    }
}

void write_field(const std::filesystem::path& path, const Field& u) {
    const auto bytes = encode_field(u);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

Field read_field(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return decode_field(bytes);
}

}  // namespace pcnls
