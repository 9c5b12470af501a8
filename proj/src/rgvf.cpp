#include "reachgrid/rgvf.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace reachgrid {

static_assert(std::endian::native == std::endian::little,
              "rgvf serialization assumes a little endian host");

std::uint32_t crc32_ieee(const std::uint8_t* data, std::size_t len) {
    static const auto table = [] {
        std::array<std::uint32_t, 256> t{};
        for (std::uint32_t i = 0; i < 256; ++i) {
            std::uint32_t c = i;
            for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
            t[i] = c;
        }
        return t;
    }();
    std::uint32_t crc = 0xFFFFFFFFu;
    for (std::size_t i = 0; i < len; ++i) crc = table[(crc ^ data[i]) & 0xFFu] ^ (crc >> 8);
    return crc ^ 0xFFFFFFFFu;
}

namespace {

template <typename T>
void append(std::vector<std::uint8_t>& buf, T v) {
    const auto old = buf.size();
    buf.resize(old + sizeof(T));
    std::memcpy(buf.data() + old, &v, sizeof(T));
}

template <typename T>
T take(const std::vector<std::uint8_t>& buf, std::size_t& pos) {
    if (pos + sizeof(T) > buf.size()) throw std::runtime_error("rgvf: truncated file");
    T v;
    std::memcpy(&v, buf.data() + pos, sizeof(T));
    pos += sizeof(T);
    return v;
}

}  // namespace

std::vector<std::string> default_axis_names(int ndim) {
    if (ndim == 5) return {"x_rel", "y_rel", "v_h", "v_r", "psi_rel"};
    if (ndim == 4) return {"x_r", "y_r", "v_r", "psi_r"};
    std::vector<std::string> names;
    for (int d = 0; d < ndim; ++d) names.push_back("d" + std::to_string(d));
    return names;
}

void write_rgvf(const std::filesystem::path& path, const ValueField& field) {
    const Grid& g = *field.grid;
    std::vector<std::uint8_t> buf;
    buf.reserve(64 + field.values.size() * sizeof(double));
    buf.insert(buf.end(), {'R', 'G', 'V', 'F'});
    append<std::uint16_t>(buf, kRgvfVersion);
    append<std::uint16_t>(buf, static_cast<std::uint16_t>(g.ndim()));
    for (int d = 0; d < g.ndim(); ++d) {
        const auto& ax = g.axis(d);
        append<double>(buf, ax.lo);
        append<double>(buf, ax.hi);
        append<std::uint32_t>(buf, static_cast<std::uint32_t>(ax.count));
        append<std::uint8_t>(buf, ax.periodic ? 1 : 0);
    }
    if (field.label.size() > 0xFFFF) throw std::runtime_error("rgvf: label too long");
    append<std::uint16_t>(buf, static_cast<std::uint16_t>(field.label.size()));
    buf.insert(buf.end(), field.label.begin(), field.label.end());
    const auto old = buf.size();
    buf.resize(old + field.values.size() * sizeof(double));
    std::memcpy(buf.data() + old, field.values.data(), field.values.size() * sizeof(double));
    append<std::uint32_t>(buf, crc32_ieee(buf.data(), buf.size()));

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("rgvf: cannot open for writing: " + path.string());
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) throw std::runtime_error("rgvf: write failed: " + path.string());
}

ValueField read_rgvf(const std::filesystem::path& path,
                     std::optional<std::vector<std::string>> axis_names) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("rgvf: cannot open: " + path.string());
    std::vector<std::uint8_t> buf((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
    if (buf.size() < 12) throw std::runtime_error("rgvf: truncated file");

    const std::uint32_t stored =
        static_cast<std::uint32_t>(buf[buf.size() - 4]) |
        (static_cast<std::uint32_t>(buf[buf.size() - 3]) << 8) |
        (static_cast<std::uint32_t>(buf[buf.size() - 2]) << 16) |
        (static_cast<std::uint32_t>(buf[buf.size() - 1]) << 24);
    if (crc32_ieee(buf.data(), buf.size() - 4) != stored)
        throw std::runtime_error("rgvf: checksum mismatch: " + path.string());

    std::size_t pos = 0;
    if (std::memcmp(buf.data(), "RGVF", 4) != 0) throw std::runtime_error("rgvf: bad magic");
    pos = 4;
    const auto version = take<std::uint16_t>(buf, pos);
    if (version != kRgvfVersion)
        throw std::runtime_error("rgvf: unsupported version " + std::to_string(version));
    const auto ndim = take<std::uint16_t>(buf, pos);
    if (ndim < 1 || ndim > 5) throw std::runtime_error("rgvf: dimension out of range");

    auto names = axis_names ? *axis_names : default_axis_names(ndim);
    if (names.size() != ndim) throw std::runtime_error("rgvf: axis name count mismatch");

    GridSpec spec;
    std::size_t total = 1;
    for (int d = 0; d < ndim; ++d) {
        AxisSpec ax;
        ax.name = names[static_cast<std::size_t>(d)];
        ax.lo = take<double>(buf, pos);
        ax.hi = take<double>(buf, pos);
        ax.count = static_cast<int>(take<std::uint32_t>(buf, pos));
        ax.periodic = take<std::uint8_t>(buf, pos) != 0;
        total *= static_cast<std::size_t>(ax.count);
        spec.axes.push_back(std::move(ax));
    }
    const auto label_len = take<std::uint16_t>(buf, pos);
    if (pos + label_len > buf.size()) throw std::runtime_error("rgvf: truncated file");
    std::string label(reinterpret_cast<const char*>(buf.data() + pos), label_len);
    pos += label_len;

    if (pos + total * sizeof(double) + 4 != buf.size())
        throw std::runtime_error("rgvf: payload size mismatch");

    ValueField f;
    f.grid = make_grid(std::move(spec));
    f.label = std::move(label);
    f.values.resize(total);
    std::memcpy(f.values.data(), buf.data() + pos, total * sizeof(double));
    return f;
}

}  // namespace reachgrid
