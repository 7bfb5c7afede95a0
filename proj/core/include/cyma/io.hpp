#pragma once

#include <filesystem>
#include <string>
#include <variant>

#include "cyma/field.hpp"

namespace cyma {

/// CYF1 field container:
///   bytes 0-3   magic "CYF1"
///   u32 LE      complex dimension n
///   u32 LE      res (points per real axis)
///   u32 LE      kind (0 = scalar, 1 = hermitian)
///   payload     f64 LE, row-major; hermitian fields store n^2 complex
///               entries (re, im) per point.
/// Periods and provenance live in the JSON sidecar `<name>.meta.json`.

using AnyField = std::variant<ScalarField, HermitianField>;

void write_field(const std::filesystem::path& path, const ScalarField& field);
void write_field(const std::filesystem::path& path, const HermitianField& field);

/// Reads either kind; errors: io_bad_magic, io_truncated, io_failure.
AnyField read_field(const std::filesystem::path& path,
                    const std::vector<double>& periods = {});

/// Reads and insists on the kind; error io_kind_mismatch otherwise.
ScalarField read_scalar_field(const std::filesystem::path& path,
                              const std::vector<double>& periods = {});
HermitianField read_hermitian_field(const std::filesystem::path& path,
                                    const std::vector<double>& periods = {});

/// Writes `<path>.meta.json` next to a field file.
void write_field_meta(const std::filesystem::path& field_path, const TorusGrid& grid,
                      const std::string& description, const std::string& extra_json = "{}");

}  // namespace cyma
