#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "hadamard/densemat.hpp"
#include "hadamard/model.hpp"
#include "hadamard/solver.hpp"

namespace hadamard::io {

enum class MatrixFormat { Csv, MatrixMarket, Pgm };

/// csv | mtx | pgm.
MatrixFormat parse_format(const std::string& name);
/// From the file extension (.csv, .mtx/.mm, .pgm); throws
/// UnsupportedFormatError otherwise.
MatrixFormat format_from_extension(const std::filesystem::path& path);

/// Reads a dense matrix. CSV: comma-separated rows, optional header line
/// (detected when the first line does not parse as numbers). MatrixMarket:
/// `array` or `coordinate` with real/integer fields, general or symmetric.
/// PGM: P2/P5 grayscale scaled by 1/maxval. Throws ParseError with the
/// offending line (or byte offset) and UnsupportedFormatError.
DenseMatrix load_matrix(const std::filesystem::path& path,
                        std::optional<MatrixFormat> format = std::nullopt);

DenseMatrix parse_csv(const std::string& text);
DenseMatrix parse_matrix_market(const std::string& text);
DenseMatrix parse_pgm(const std::string& bytes);

/// `synth:normal:MxN:seed`, `synth:lowrank:MxN:kK:seed`,
/// `synth:planted:MxN:r1,r2,...:seed`, `synth:identity:N`.
bool is_synthetic_spec(const std::string& spec);
DenseMatrix generate_synthetic(const std::string& spec);

/// Factors with entries |z|, z standard normal (drawn as init_random with
/// the same seed), so every W_i H_i is entrywise positive.
HadamardModel planted_model(std::size_t m, std::size_t n, const std::vector<std::size_t>& ranks,
                            std::uint64_t seed);
/// planted_model(...).recon().
DenseMatrix planted_matrix(std::size_t m, std::size_t n, const std::vector<std::size_t>& ranks,
                           std::uint64_t seed);

/// %.17g, which round-trips every double.
std::string format_real(double v);

std::string to_csv(const DenseMatrix& a);
/// Header `iter,seconds,rel_error`, one row per trace entry, LF endings.
std::string trace_to_csv(const RunTrace& trace);

/// Writes via a temporary sibling file and a rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace hadamard::io
