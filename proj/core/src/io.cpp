#include "cyma/io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "cyma/errors.hpp"

namespace cyma {

namespace {

constexpr char kMagic[4] = {'C', 'Y', 'F', '1'};

static_assert(std::endian::native == std::endian::little ||
                  std::endian::native == std::endian::big,
              "mixed-endian platforms are not supported");

constexpr bool kHostLittle = std::endian::native == std::endian::little;

std::uint32_t byteswap32(std::uint32_t v) {
  return ((v & 0xff000000u) >> 24) | ((v & 0x00ff0000u) >> 8) |
         ((v & 0x0000ff00u) << 8) | ((v & 0x000000ffu) << 24);
}

std::uint64_t byteswap64(std::uint64_t v) {
  v = ((v & 0xffffffff00000000ull) >> 32) | ((v & 0x00000000ffffffffull) << 32);
  v = ((v & 0xffff0000ffff0000ull) >> 16) | ((v & 0x0000ffff0000ffffull) << 16);
  v = ((v & 0xff00ff00ff00ff00ull) >> 8) | ((v & 0x00ff00ff00ff00ffull) << 8);
  return v;
}

std::uint32_t to_le(std::uint32_t v) {
  if constexpr (kHostLittle) return v;
  return byteswap32(v);
}

double double_to_le_bits(double v) {
  if constexpr (kHostLittle) return v;
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  bits = byteswap64(bits);
  std::memcpy(&v, &bits, sizeof(bits));
  return v;
}

void write_header(std::ofstream& out, std::uint32_t n, std::uint32_t res,
                  std::uint32_t kind) {
  out.write(kMagic, 4);
  const std::uint32_t fields[3] = {to_le(n), to_le(res), to_le(kind)};
  out.write(reinterpret_cast<const char*>(fields), sizeof(fields));
}

void write_doubles(std::ofstream& out, std::span<const double> values) {
  if constexpr (kHostLittle) {
    out.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(values.size() * sizeof(double)));
  } else {
    for (double v : values) {
      const double le = double_to_le_bits(v);
      out.write(reinterpret_cast<const char*>(&le), sizeof(le));
    }
  }
}

struct Header {
  std::uint32_t n, res, kind;
};

Header read_header(std::ifstream& in, const std::filesystem::path& path) {
  char magic[4];
  if (!in.read(magic, 4))
    fail(ErrorCode::io_truncated, "file too short for a CYF1 header: " + path.string());
  if (std::memcmp(magic, kMagic, 4) != 0)
    fail(ErrorCode::io_bad_magic, "not a CYF1 field file: " + path.string());
  std::uint32_t fields[3];
  if (!in.read(reinterpret_cast<char*>(fields), sizeof(fields)))
    fail(ErrorCode::io_truncated, "truncated CYF1 header: " + path.string());
  return {to_le(fields[0]), to_le(fields[1]), to_le(fields[2])};
}

std::vector<double> read_doubles(std::ifstream& in, std::size_t count,
                                 const std::filesystem::path& path) {
  std::vector<double> values(count);
  if (!in.read(reinterpret_cast<char*>(values.data()),
               static_cast<std::streamsize>(count * sizeof(double))))
    fail(ErrorCode::io_truncated, "truncated CYF1 payload: " + path.string());
  // Reject trailing garbage silently? No: extra bytes mean a kind/dimension
  // mismatch upstream, surface it.
  char probe;
  if (in.read(&probe, 1))
    fail(ErrorCode::io_truncated, "CYF1 payload longer than the header promises: " +
                                      path.string());
  if constexpr (!kHostLittle)
    for (double& v : values) v = double_to_le_bits(v);
  return values;
}

}  // namespace

void write_field(const std::filesystem::path& path, const ScalarField& field) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::io_failure, "cannot open for writing: " + path.string());
  write_header(out, static_cast<std::uint32_t>(field.grid().n()),
               static_cast<std::uint32_t>(field.grid().res()), 0);
  write_doubles(out, field.values());
  if (!out) fail(ErrorCode::io_failure, "write failed: " + path.string());
}

void write_field(const std::filesystem::path& path, const HermitianField& field) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::io_failure, "cannot open for writing: " + path.string());
  write_header(out, static_cast<std::uint32_t>(field.grid().n()),
               static_cast<std::uint32_t>(field.grid().res()), 1);
  std::vector<double> flat;
  flat.reserve(field.coeffs().size() * 2);
  for (const complex_t& c : field.coeffs()) {
    flat.push_back(c.real());
    flat.push_back(c.imag());
  }
  write_doubles(out, flat);
  if (!out) fail(ErrorCode::io_failure, "write failed: " + path.string());
}

AnyField read_field(const std::filesystem::path& path, const std::vector<double>& periods) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io_failure, "cannot open for reading: " + path.string());
  const Header h = read_header(in, path);
  if (h.kind != 0 && h.kind != 1)
    fail(ErrorCode::io_kind_mismatch, "unknown CYF1 field kind: " + path.string());
  GridPtr grid = periods.empty()
                     ? TorusGrid::make(static_cast<int>(h.n), static_cast<int>(h.res))
                     : TorusGrid::make(static_cast<int>(h.n), static_cast<int>(h.res), periods);
  const std::size_t npts = grid->point_count();
  if (h.kind == 0) {
    std::vector<double> values = read_doubles(in, npts, path);
    return ScalarField(std::move(grid), std::move(values));
  }
  const std::size_t nn = static_cast<std::size_t>(h.n) * h.n;
  std::vector<double> flat = read_doubles(in, npts * nn * 2, path);
  std::vector<complex_t> coeffs(npts * nn);
  for (std::size_t i = 0; i < coeffs.size(); ++i)
    coeffs[i] = complex_t(flat[2 * i], flat[2 * i + 1]);
  return HermitianField(std::move(grid), std::move(coeffs));
}

ScalarField read_scalar_field(const std::filesystem::path& path,
                              const std::vector<double>& periods) {
  AnyField f = read_field(path, periods);
  if (!std::holds_alternative<ScalarField>(f))
    fail(ErrorCode::io_kind_mismatch, "expected a scalar field: " + path.string());
  return std::get<ScalarField>(std::move(f));
}

HermitianField read_hermitian_field(const std::filesystem::path& path,
                                    const std::vector<double>& periods) {
  AnyField f = read_field(path, periods);
  if (!std::holds_alternative<HermitianField>(f))
    fail(ErrorCode::io_kind_mismatch, "expected a hermitian field: " + path.string());
  return std::get<HermitianField>(std::move(f));
}

void write_field_meta(const std::filesystem::path& field_path, const TorusGrid& grid,
                      const std::string& description, const std::string& extra_json) {
  nlohmann::json meta;
  meta["n"] = grid.n();
  meta["res"] = grid.res();
  meta["periods"] = grid.periods();
  meta["description"] = description;
  meta["parameters"] = nlohmann::json::parse(extra_json);
  std::filesystem::path meta_path = field_path;
  meta_path += ".meta.json";
  std::ofstream out(meta_path, std::ios::trunc);
  if (!out) fail(ErrorCode::io_failure, "cannot write sidecar: " + meta_path.string());
  out << meta.dump(2) << "\n";
}

}  // namespace cyma
