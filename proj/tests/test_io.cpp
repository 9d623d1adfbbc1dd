#include <gtest/gtest.h>

#include <bit>
#include <cstring>
#include <limits>

#include "igauge/generators.hpp"
#include "igauge/io.hpp"

using namespace igauge;

namespace {

std::size_t error_offset(const std::string& bytes) {
  try {
    decode(bytes);
  } catch (const format_error& e) {
    return e.offset;
  }
  ADD_FAILURE() << "decode accepted malformed bytes";
  return 0;
}

void put_real(std::string& b, std::size_t at, double v) {
  const auto u = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) b[at + i] = char((u >> (8 * i)) & 0xff);
}

}  // namespace

TEST(Io, HeaderBytesAreLittleEndian) {
  const GridSpec g = grid3(6);
  const std::string b = encode(to_file(Connection<SU2>(g)));
  ASSERT_EQ(b.size(), 8u + 3 * 21 + 6 * 6 * 6 * 3 * 3 * 8);
  EXPECT_EQ(b.substr(0, 4), "IGF1");
  EXPECT_EQ(b[4], 1);  // SU2
  EXPECT_EQ(b[5], 2);  // algebra
  EXPECT_EQ(b[6], 3);
  EXPECT_EQ(b[7], 3);
  EXPECT_EQ(std::uint8_t(b[8]), 6);
  EXPECT_EQ(b[9] | b[10] | b[11], 0);
  EXPECT_EQ(b[12], 1);
  // origin 0.0, extent 2 pi
  for (int i = 13; i < 21; ++i) EXPECT_EQ(b[i], 0);
  std::uint64_t ext = 0;
  for (int i = 0; i < 8; ++i) ext |= std::uint64_t(std::uint8_t(b[21 + i])) << (8 * i);
  EXPECT_EQ(std::bit_cast<double>(ext), 2 * std::numbers::pi);
}

TEST(Io, RoundTripsAreBitExact) {
  const auto B3 = gen_random_conn<SU2>(grid3(8), 1, 2, 0.5);
  const auto B4 = gen_random_conn<SO3>(grid4(6, 6, 5, 7, 0.5, 3.0), 2, 1, 0.5);
  const auto u2 = gen_random_gauge<SU2>(grid3(8), 3, 1, 1.0);
  const auto u3 = gen_random_gauge<SO3>(grid3(8), 4, 1, 1.0);
  for (const FieldFile& f : {to_file(B3), to_file(B4), to_file(u2), to_file(u3)}) {
    const std::string b = encode(f);
    const FieldFile d = decode(b);
    EXPECT_EQ(d.group, f.group);
    EXPECT_EQ(d.kind, f.kind);
    EXPECT_EQ(d.components, f.components);
    ASSERT_EQ(d.grid.dim(), f.grid.dim());
    for (std::size_t a = 0; a < f.grid.dim(); ++a) {
      EXPECT_EQ(d.grid.axes[a].size, f.grid.axes[a].size);
      EXPECT_EQ(d.grid.axes[a].periodic, f.grid.axes[a].periodic);
      EXPECT_EQ(d.grid.axes[a].extent, f.grid.axes[a].extent);
    }
    EXPECT_EQ(0, std::memcmp(d.values.data(), f.values.data(), 8 * f.values.size()));
    EXPECT_EQ(encode(d), b);
  }
  const auto back = as_connection<SO3>(decode(encode(to_file(B4))), 4);
  EXPECT_EQ(back.comp[3].data, B4.comp[3].data);
  EXPECT_EQ(as_gauge<SU2>(decode(encode(to_file(u2)))).data, u2.data);
}

TEST(Io, TruncationReportsOffset) {
  const std::string b = encode(to_file(Connection<SU2>(grid3(6))));
  EXPECT_EQ(error_offset(b.substr(0, b.size() - 8)), b.size() - 8);
  EXPECT_EQ(error_offset(b.substr(0, b.size() - 3)), b.size() - 8);
  EXPECT_EQ(error_offset(b.substr(0, 10)), 8u);
  EXPECT_EQ(error_offset(b.substr(0, 2)), 0u);
}

TEST(Io, MalformedHeadersAndPayloads) {
  const std::string good = encode(to_file(Connection<SU2>(grid3(6))));
  std::string b = good;
  b[0] = 'X';
  EXPECT_EQ(error_offset(b), 0u);
  b = good;
  b[4] = 7;
  EXPECT_EQ(error_offset(b), 4u);
  b = good;
  b[5] = 0;
  EXPECT_EQ(error_offset(b), 5u);
  b = good;
  b[12] = 2;
  EXPECT_EQ(error_offset(b), 12u);
  EXPECT_EQ(error_offset(good + "x"), good.size());
  b = good;
  put_real(b, 8 + 63 + 16, std::numeric_limits<double>::quiet_NaN());
  EXPECT_EQ(error_offset(b), 8u + 63 + 16);
}

TEST(Io, NonGroupValueIsRejected) {
  std::string b = encode(to_file(GaugeField<SU2>(grid3(6), SU2::identity())));
  const std::size_t at = 8 + 63 + 32 * 5;
  put_real(b, at, 0.9);
  EXPECT_EQ(error_offset(b), at);
  std::string r = encode(to_file(GaugeField<SO3>(grid3(6), SO3::identity())));
  put_real(r, 8 + 63 + 72 + 8, 0.1);
  EXPECT_EQ(error_offset(r), 8u + 63 + 72);
}

TEST(Io, TypedViewsCheckShape) {
  const FieldFile c3 = to_file(Connection<SU2>(grid3(6)));
  const FieldFile c4 = to_file(Connection<SU2>(grid4(6, 6, 6, 6, 1.0, 2.0)));
  EXPECT_THROW(as_connection<SU2>(c3, 4), usage_error);
  EXPECT_THROW(as_connection<SO3>(c3), usage_error);
  EXPECT_THROW(as_gauge<SU2>(c3), usage_error);
  EXPECT_NO_THROW(as_connection<SU2>(c4, 4));
  FieldFile small = to_file(Connection<SU2>(grid3(5)));
  small.grid.axes[1].size = 4;
  small.values.resize(5 * 4 * 5 * 9);
  EXPECT_THROW(as_connection<SU2>(decode(encode(small))), usage_error);
  EXPECT_THROW(read_field("/nonexistent/field.igf"), usage_error);
}
