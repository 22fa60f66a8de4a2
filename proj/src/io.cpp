#include "hadamard/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string_view>
#include <vector>

#include "hadamard/error.hpp"
#include "hadamard/init.hpp"
#include "hadamard/rng.hpp"

namespace hadamard::io {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::optional<double> parse_real(std::string_view token) {
  token = trim(token);
  if (token.empty()) return std::nullopt;
  if (token.front() == '+') token.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size()) return std::nullopt;
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::vector<std::string_view> lines_of(std::string_view text) {
  auto out = split(text, '\n');
  for (auto& l : out)
    if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
  return out;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double checked(double v, std::size_t line) {
  if (!std::isfinite(v)) throw ParseError("non-finite value", line);
  return v;
}

}  // namespace

MatrixFormat parse_format(const std::string& name) {
  const std::string n = lower(name);
  if (n == "csv") return MatrixFormat::Csv;
  if (n == "mtx" || n == "mm" || n == "matrixmarket") return MatrixFormat::MatrixMarket;
  if (n == "pgm") return MatrixFormat::Pgm;
  throw UnsupportedFormatError("unsupported matrix format '" + name + "'");
}

MatrixFormat format_from_extension(const std::filesystem::path& path) {
  const std::string ext = lower(path.extension().string());
  if (ext == ".csv" || ext == ".txt") return MatrixFormat::Csv;
  if (ext == ".mtx" || ext == ".mm") return MatrixFormat::MatrixMarket;
  if (ext == ".pgm") return MatrixFormat::Pgm;
  throw UnsupportedFormatError("cannot infer the format of '" + path.string() +
                               "'; pass --format");
}

DenseMatrix load_matrix(const std::filesystem::path& path, std::optional<MatrixFormat> format) {
  const MatrixFormat fmt = format ? *format : format_from_extension(path);
  const std::string contents = read_all(path);
  switch (fmt) {
    case MatrixFormat::Csv: return parse_csv(contents);
    case MatrixFormat::MatrixMarket: return parse_matrix_market(contents);
    case MatrixFormat::Pgm: return parse_pgm(contents);
  }
  throw UnsupportedFormatError("unsupported matrix format");
}

DenseMatrix parse_csv(const std::string& text) {
  std::vector<double> data;
  std::size_t cols = 0;
  std::size_t rows = 0;
  bool first_line = true;
  const auto lines = lines_of(text);
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    const std::string_view line = trim(lines[ln]);
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    std::vector<double> values;
    values.reserve(fields.size());
    for (auto f : fields) {
      auto v = parse_real(f);
      if (!v) break;
      values.push_back(*v);
    }
    if (values.size() != fields.size()) {
      if (first_line) {  // header
        first_line = false;
        continue;
      }
      throw ParseError("line " + std::to_string(ln + 1) + ": non-numeric field '" +
                           std::string(trim(fields[values.size()])) + "'",
                       ln + 1);
    }
    first_line = false;
    if (rows == 0) {
      cols = values.size();
    } else if (values.size() != cols) {
      throw ParseError("line " + std::to_string(ln + 1) + ": expected " + std::to_string(cols) +
                           " fields, got " + std::to_string(values.size()),
                       ln + 1);
    }
    for (double v : values) data.push_back(checked(v, ln + 1));
    ++rows;
  }
  if (rows == 0) throw ParseError("CSV contains no data rows", lines.size());
  return DenseMatrix(rows, cols, std::move(data));
}

DenseMatrix parse_matrix_market(const std::string& text) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw ParseError("empty MatrixMarket file", 1);
  const auto banner = split_ws(lines[0]);
  if (banner.size() < 5 || lower(banner[0]) != "%%matrixmarket" || lower(banner[1]) != "matrix")
    throw ParseError("line 1: missing %%MatrixMarket matrix banner", 1);
  const std::string layout = lower(banner[2]);
  const std::string field = lower(banner[3]);
  const std::string symmetry = lower(banner[4]);
  if (layout != "array" && layout != "coordinate")
    throw UnsupportedFormatError("MatrixMarket layout '" + layout + "' is not supported");
  if (field != "real" && field != "integer" && field != "double")
    throw UnsupportedFormatError("MatrixMarket field '" + field + "' is not supported");
  if (symmetry != "general" && symmetry != "symmetric")
    throw UnsupportedFormatError("MatrixMarket symmetry '" + symmetry + "' is not supported");
  const bool symmetric = symmetry == "symmetric";

  std::size_t ln = 1;
  auto next_content = [&]() -> std::optional<std::string_view> {
    while (ln < lines.size()) {
      const std::string_view l = trim(lines[ln++]);
      if (l.empty() || l.front() == '%') continue;
      return l;
    }
    return std::nullopt;
  };
  auto as_count = [&](std::string_view tok) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
      throw ParseError("line " + std::to_string(ln) + ": expected a count", ln);
    return v;
  };
  auto as_real = [&](std::string_view tok) {
    auto v = parse_real(tok);
    if (!v) throw ParseError("line " + std::to_string(ln) + ": expected a number", ln);
    return checked(*v, ln);
  };

  const auto size_line = next_content();
  if (!size_line) throw ParseError("missing size line", ln);
  const auto dims = split_ws(*size_line);
  const std::size_t rows = dims.size() >= 1 ? as_count(dims[0]) : 0;
  const std::size_t cols = dims.size() >= 2 ? as_count(dims[1]) : 0;
  if (dims.size() != (layout == "array" ? 2u : 3u))
    throw ParseError("line " + std::to_string(ln) + ": malformed size line", ln);
  if (symmetric && rows != cols) throw ParseError("symmetric matrix must be square", ln);

  DenseMatrix out(rows, cols, 0.0);
  if (layout == "array") {
    // Column-major, lower triangle only when symmetric.
    for (std::size_t j = 0; j < cols; ++j) {
      for (std::size_t i = symmetric ? j : 0; i < rows; ++i) {
        const auto l = next_content();
        if (!l) throw ParseError("unexpected end of array data", ln);
        const auto tok = split_ws(*l);
        if (tok.size() != 1)
          throw ParseError("line " + std::to_string(ln) + ": expected one value", ln);
        const double v = as_real(tok[0]);
        out(i, j) = v;
        if (symmetric) out(j, i) = v;
      }
    }
  } else {
    const std::size_t nnz = as_count(dims[2]);
    for (std::size_t k = 0; k < nnz; ++k) {
      const auto l = next_content();
      if (!l) throw ParseError("unexpected end of coordinate data", ln);
      const auto tok = split_ws(*l);
      if (tok.size() != 3)
        throw ParseError("line " + std::to_string(ln) + ": expected 'row col value'", ln);
      const std::size_t i = as_count(tok[0]);
      const std::size_t j = as_count(tok[1]);
      if (i < 1 || i > rows || j < 1 || j > cols)
        throw ParseError("line " + std::to_string(ln) + ": index out of range", ln);
      const double v = as_real(tok[2]);
      out(i - 1, j - 1) += v;
      if (symmetric && i != j) out(j - 1, i - 1) += v;
    }
  }
  return out;
}

DenseMatrix parse_pgm(const std::string& bytes) {
  std::size_t pos = 0;
  std::size_t line = 1;
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      const char c = bytes[pos];
      if (c == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        if (c == '\n') ++line;
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_count = [&]() -> std::size_t {
    skip_space();
    const std::size_t start = pos;
    while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) ++pos;
    if (pos == start)
      throw ParseError("PGM line " + std::to_string(line) + ": expected an integer", line, start);
    return std::stoul(bytes.substr(start, pos - start));
  };

  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5'))
    throw UnsupportedFormatError("only P2/P5 grayscale PGM is supported");
  const bool binary = bytes[1] == '5';
  pos = 2;
  const std::size_t width = read_count();
  const std::size_t height = read_count();
  const std::size_t maxval = read_count();
  if (maxval == 0 || maxval > 65535) throw ParseError("PGM maxval out of range", line, pos);

  DenseMatrix out(height, width);
  const double scale = 1.0 / static_cast<double>(maxval);
  if (binary) {
    ++pos;  // single whitespace byte after maxval
    const std::size_t bpp = maxval < 256 ? 1 : 2;
    if (bytes.size() < pos + width * height * bpp)
      throw ParseError("PGM pixel data truncated", 0, bytes.size());
    for (std::size_t k = 0; k < width * height; ++k) {
      std::size_t v = static_cast<unsigned char>(bytes[pos]);
      if (bpp == 2) v = (v << 8) | static_cast<unsigned char>(bytes[pos + 1]);
      if (v > maxval) throw ParseError("PGM pixel exceeds maxval", 0, pos);
      pos += bpp;
      out.data()[k] = static_cast<double>(v) * scale;
    }
  } else {
    for (std::size_t k = 0; k < width * height; ++k) {
      const std::size_t v = read_count();
      if (v > maxval)
        throw ParseError("PGM line " + std::to_string(line) + ": pixel exceeds maxval", line, pos);
      out.data()[k] = static_cast<double>(v) * scale;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

bool is_synthetic_spec(const std::string& spec) { return spec.rfind("synth:", 0) == 0; }

namespace {

std::pair<std::size_t, std::size_t> parse_shape(std::string_view s, const std::string& spec) {
  const auto parts = split(s, 'x');
  if (parts.size() != 2) throw std::invalid_argument("bad shape in '" + spec + "'");
  std::size_t m = 0, n = 0;
  auto r1 = std::from_chars(parts[0].data(), parts[0].data() + parts[0].size(), m);
  auto r2 = std::from_chars(parts[1].data(), parts[1].data() + parts[1].size(), n);
  if (r1.ec != std::errc() || r2.ec != std::errc() || m == 0 || n == 0)
    throw std::invalid_argument("bad shape in '" + spec + "'");
  return {m, n};
}

std::uint64_t parse_u64(std::string_view s, const std::string& spec) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw std::invalid_argument("bad integer '" + std::string(s) + "' in '" + spec + "'");
  return v;
}

}  // namespace

HadamardModel planted_model(std::size_t m, std::size_t n, const std::vector<std::size_t>& ranks,
                            std::uint64_t seed) {
  HadamardModel model = init_random(m, n, ranks, seed);
  for (FactorPair& f : model.factors_mut()) {
    for (double& v : f.w.data()) v = std::abs(v);
    for (double& v : f.h.data()) v = std::abs(v);
  }
  return model;
}

DenseMatrix planted_matrix(std::size_t m, std::size_t n, const std::vector<std::size_t>& ranks,
                           std::uint64_t seed) {
  return planted_model(m, n, ranks, seed).recon();
}

DenseMatrix generate_synthetic(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts.size() < 3 || parts[0] != "synth")
    throw std::invalid_argument("bad synthetic spec '" + spec + "'");
  const std::string_view kind = parts[1];
  if (kind == "identity") {
    if (parts.size() != 3) throw std::invalid_argument("expected synth:identity:N");
    return DenseMatrix::identity(parse_u64(parts[2], spec));
  }
  const auto [m, n] = parse_shape(parts[2], spec);
  if (kind == "normal") {
    if (parts.size() != 4) throw std::invalid_argument("expected synth:normal:MxN:seed");
    Rng rng(parse_u64(parts[3], spec));
    DenseMatrix out(m, n);
    for (double& v : out.data()) v = rng.normal();
    return out;
  }
  if (kind == "lowrank") {
    if (parts.size() != 5 || parts[3].empty() || parts[3][0] != 'k')
      throw std::invalid_argument("expected synth:lowrank:MxN:kK:seed");
    const std::size_t k = parse_u64(parts[3].substr(1), spec);
    Rng rng(parse_u64(parts[4], spec));
    DenseMatrix a(m, k), b(k, n);
    for (double& v : a.data()) v = rng.normal();
    for (double& v : b.data()) v = rng.normal();
    return matmul(a, b);
  }
  if (kind == "planted") {
    if (parts.size() != 5) throw std::invalid_argument("expected synth:planted:MxN:r1,r2:seed");
    std::vector<std::size_t> ranks;
    for (auto tok : split(parts[3], ',')) ranks.push_back(parse_u64(tok, spec));
    return planted_matrix(m, n, ranks, parse_u64(parts[4], spec));
  }
  throw std::invalid_argument("unknown synthetic kind '" + std::string(kind) + "'");
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string to_csv(const DenseMatrix& a) {
  std::string out;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (j) out += ',';
      out += format_real(a(i, j));
    }
    out += '\n';
  }
  return out;
}

std::string trace_to_csv(const RunTrace& trace) {
  std::string out = "iter,seconds,rel_error\n";
  for (const auto& e : trace.entries) {
    out += std::to_string(e.t) + ',' + format_real(e.seconds) + ',' + format_real(e.rel_error) +
           '\n';
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("failed writing '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace hadamard::io
