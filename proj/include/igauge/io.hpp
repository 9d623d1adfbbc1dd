// IGF1 field files. All integers and reals little-endian.
//
//   "IGF1" | group u8 | kind u8 | num_axes u8 | num_components u8
//   per axis: size u32 | periodic u8 | origin f64 | extent f64
//   payload: points row-major over the axes, then components, then reals
#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "igauge/connection.hpp"

namespace igauge {

struct format_error : std::runtime_error {
  std::size_t offset;
  format_error(std::size_t off, const std::string& what)
      : std::runtime_error("format error at byte " + std::to_string(off) + ": " + what), offset(off) {}
};

enum class FieldKind : std::uint8_t { group = 1, algebra = 2 };

struct FieldFile {
  GroupTag group = GroupTag::SU2;
  FieldKind kind = FieldKind::algebra;
  GridSpec grid;
  std::size_t components = 1;
  std::vector<double> values;

  std::size_t per_value() const {
    if (kind == FieldKind::algebra) return 3;
    return group == GroupTag::SU2 ? SU2::n_real : SO3::n_real;
  }
};

inline constexpr double membership_tolerance = 1e-9;

namespace detail {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <class U>
void put_le(std::string& out, U v) {
  for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(char((v >> (8 * i)) & 0xff));
}

class Reader {
 public:
  explicit Reader(std::string_view b) : bytes_(b) {}
  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

  template <class U>
  U uint(const char* what) {
    need(sizeof(U), what);
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) v |= U(std::uint8_t(bytes_[pos_ + i])) << (8 * i);
    pos_ += sizeof(U);
    return v;
  }
  double real(const char* what) { return std::bit_cast<double>(uint<std::uint64_t>(what)); }
  void need(std::size_t n, const char* what) const {
    if (remaining() < n) throw format_error(pos_, std::string("truncated ") + what);
  }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

inline double value_membership(GroupTag g, const double* v) {
  if (g == GroupTag::SU2) {
    SU2::Element e;
    std::copy_n(v, SU2::n_real, e.v.begin());
    return SU2::membership_error(e);
  }
  SO3::Element e;
  std::copy_n(v, SO3::n_real, e.v.begin());
  return SO3::membership_error(e);
}

}  // namespace detail

inline std::string encode(const FieldFile& f) {
  if (f.grid.dim() == 0 || f.grid.dim() > 255 || f.components == 0 || f.components > 255)
    throw usage_error("field cannot be encoded: bad axis or component count");
  if (f.values.size() != f.grid.points() * f.components * f.per_value())
    throw usage_error("field value count does not match its grid");
  std::string out = "IGF1";
  out.push_back(char(std::uint8_t(f.group)));
  out.push_back(char(std::uint8_t(f.kind)));
  out.push_back(char(std::uint8_t(f.grid.dim())));
  out.push_back(char(std::uint8_t(f.components)));
  for (const Axis& a : f.grid.axes) {
    if (a.size > std::numeric_limits<std::uint32_t>::max()) throw usage_error("axis too large");
    detail::put_le(out, std::uint32_t(a.size));
    out.push_back(char(a.periodic ? 1 : 0));
    detail::put_le(out, std::bit_cast<std::uint64_t>(a.origin));
    detail::put_le(out, std::bit_cast<std::uint64_t>(a.extent));
  }
  out.reserve(out.size() + 8 * f.values.size());
  for (double v : f.values) detail::put_le(out, std::bit_cast<std::uint64_t>(v));
  return out;
}

inline FieldFile decode(std::string_view bytes) {
  detail::Reader in(bytes);
  in.need(4, "magic");
  if (bytes.substr(0, 4) != "IGF1") throw format_error(0, "bad magic (expected IGF1)");
  in.uint<std::uint32_t>("magic");

  FieldFile f;
  const std::size_t group_at = in.pos();
  const auto group = in.uint<std::uint8_t>("header");
  if (group != 1 && group != 2) throw format_error(group_at, "unknown group tag " + std::to_string(group));
  f.group = GroupTag(group);
  const std::size_t kind_at = in.pos();
  const auto kind = in.uint<std::uint8_t>("header");
  if (kind != 1 && kind != 2) throw format_error(kind_at, "unknown field kind " + std::to_string(kind));
  f.kind = FieldKind(kind);
  const std::size_t axes_at = in.pos();
  const auto num_axes = in.uint<std::uint8_t>("header");
  if (num_axes == 0) throw format_error(axes_at, "zero axes");
  const std::size_t comps_at = in.pos();
  f.components = in.uint<std::uint8_t>("header");
  if (f.components == 0) throw format_error(comps_at, "zero components");
  if (f.kind == FieldKind::group && f.components != 1)
    throw format_error(comps_at, "group fields have exactly one component");

  std::size_t count = f.components * f.per_value();
  for (int k = 0; k < num_axes; ++k) {
    const std::size_t at = in.pos();
    Axis a;
    a.size = in.uint<std::uint32_t>("axis header");
    const std::size_t flag_at = in.pos();
    const auto periodic = in.uint<std::uint8_t>("axis header");
    if (periodic > 1) throw format_error(flag_at, "periodic flag must be 0 or 1");
    a.periodic = periodic == 1;
    a.origin = in.real("axis header");
    a.extent = in.real("axis header");
    if (a.size == 0 || (!a.periodic && a.size < 2)) throw format_error(at, "axis size too small");
    if (!std::isfinite(a.origin) || !std::isfinite(a.extent) || !(a.extent > 0.0))
      throw format_error(at + 5, "axis origin/extent must be finite with positive extent");
    if (count > std::numeric_limits<std::size_t>::max() / 8 / a.size) throw format_error(at, "payload size overflows");
    count *= a.size;
    f.grid.axes.push_back(a);
  }

  const std::size_t payload_at = in.pos();
  if (in.remaining() < 8 * count) throw format_error(payload_at + 8 * (in.remaining() / 8), "truncated payload");
  if (in.remaining() > 8 * count) throw format_error(payload_at + 8 * count, "trailing bytes after payload");
  f.values.resize(count);
  for (auto& v : f.values) {
    const std::size_t at = in.pos();
    v = in.real("payload");
    if (!std::isfinite(v)) throw format_error(at, "non-finite value");
  }
  if (f.kind == FieldKind::group) {
    const std::size_t per = f.per_value();
    for (std::size_t i = 0; i < f.values.size(); i += per)
      if (detail::value_membership(f.group, &f.values[i]) > membership_tolerance)
        throw format_error(payload_at + 8 * i, "value is not a group element");
  }
  return f;
}

inline void write_field(const std::string& path, const FieldFile& f) {
  const std::string bytes = encode(f);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw usage_error("cannot open " + path + " for writing");
  out.write(bytes.data(), std::streamsize(bytes.size()));
  if (!out) throw usage_error("write to " + path + " failed");
}

inline FieldFile read_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw usage_error("cannot open " + path);
  const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return decode(bytes);
}

// Conversions between files and typed fields.

template <class G>
FieldFile to_file(const GaugeField<G>& u) {
  FieldFile f{G::tag, FieldKind::group, u.grid, 1, {}};
  f.values.reserve(u.size() * G::n_real);
  for (const auto& e : u.data) f.values.insert(f.values.end(), e.v.begin(), e.v.end());
  return f;
}

template <class G>
FieldFile to_file(const Connection<G>& c) {
  FieldFile f{G::tag, FieldKind::algebra, c.grid, c.dim(), {}};
  f.values.reserve(c.points() * c.dim() * 3);
  for (std::size_t p = 0; p < c.points(); ++p)
    for (const auto& comp : c.comp) f.values.insert(f.values.end(), comp.data[p].v.begin(), comp.data[p].v.end());
  return f;
}

inline void require_group(const FieldFile& f, GroupTag g) {
  if (f.group != g) throw usage_error("field file is for group " + to_string(f.group) + ", expected " + to_string(g));
}

inline void require_stencil_sizes(const GridSpec& g) {
  for (const Axis& a : g.axes)
    if (a.size < 5) throw usage_error("every axis needs at least 5 points for the difference stencils");
}

template <class G>
GaugeField<G> as_gauge(const FieldFile& f) {
  require_group(f, G::tag);
  require_stencil_sizes(f.grid);
  if (f.kind != FieldKind::group) throw usage_error("expected a gauge transformation file, got a connection");
  GaugeField<G> u(f.grid);
  for (std::size_t p = 0; p < u.size(); ++p) std::copy_n(&f.values[p * G::n_real], G::n_real, u.data[p].v.begin());
  return u;
}

/// Connection with one component per axis; `dim` (3 or 4) is checked when nonzero.
template <class G>
Connection<G> as_connection(const FieldFile& f, std::size_t dim = 0) {
  require_group(f, G::tag);
  if (f.kind != FieldKind::algebra) throw usage_error("expected a connection file, got a gauge transformation");
  if (f.components != f.grid.dim()) throw usage_error("connection files carry one component per axis");
  if (dim != 0 && f.grid.dim() != dim)
    throw usage_error("expected a " + std::to_string(dim) + "d field, got " + std::to_string(f.grid.dim()) + "d");
  require_stencil_sizes(f.grid);
  const bool radial_first = f.grid.dim() == 4;
  for (std::size_t a = 0; a < f.grid.dim(); ++a)
    if (f.grid.axes[a].periodic == (radial_first && a == 0))
      throw usage_error("axis " + std::to_string(a) + " has the wrong periodicity");
  Connection<G> c(f.grid);
  const std::size_t n = c.dim();
  for (std::size_t p = 0; p < c.points(); ++p)
    for (std::size_t k = 0; k < n; ++k) std::copy_n(&f.values[(p * n + k) * 3], 3, c.comp[k].data[p].v.begin());
  return c;
}

}  // namespace igauge
