#include "rcgrf/model_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace rcgrf {

static_assert(std::endian::native == std::endian::little,
              "model files are little-endian; big-endian hosts are unsupported");

namespace {

constexpr char kMagic[8] = {'R', 'C', 'G', 'R', 'F', 'M', 'D', 'L'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ostream& os, std::uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint32_t read_u32(std::istream& is) {
  std::uint32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

void write_block(std::ostream& os, const double* data, std::streamsize count) {
  os.write(reinterpret_cast<const char*>(data), count * static_cast<std::streamsize>(sizeof(double)));
}

void read_block(std::istream& is, double* data, std::streamsize count) {
  is.read(reinterpret_cast<char*>(data), count * static_cast<std::streamsize>(sizeof(double)));
}

}  // namespace

void save_model(const CellParams& params, const std::string& path) {
  params.validate();
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorCode::kIo, "cannot open '" + path + "' for writing");
  os.write(kMagic, sizeof(kMagic));
  write_u32(os, kVersion);
  write_u32(os, params.kind == CellKind::kLstm ? 1u : 0u);
  write_u32(os, static_cast<std::uint32_t>(params.input_dim));
  write_u32(os, static_cast<std::uint32_t>(params.hidden_dim));
  write_u32(os, static_cast<std::uint32_t>(params.num_classes));
  for (const GateBlock& g : params.gates) {
    write_block(os, g.w.data(), g.w.size());
    write_block(os, g.u.data(), g.u.size());
    write_block(os, g.b.data(), g.b.size());
  }
  write_block(os, params.readout_w.data(), params.readout_w.size());
  write_block(os, params.readout_b.data(), params.readout_b.size());
  if (!os) fail(ErrorCode::kIo, "write failed for '" + path + "'");
}

CellParams load_model(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorCode::kIo, "cannot open '" + path + "' for reading");
  char magic[8] = {};
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    fail(ErrorCode::kSchema, "'" + path + "' is not a model file (bad magic)");
  }
  const std::uint32_t version = read_u32(is);
  if (version != kVersion) {
    fail(ErrorCode::kSchema,
         "'" + path + "': unsupported model version " + std::to_string(version));
  }
  const std::uint32_t kind_raw = read_u32(is);
  if (kind_raw > 1) fail(ErrorCode::kSchema, "'" + path + "': unknown cell kind");
  const CellKind kind = kind_raw == 1 ? CellKind::kLstm : CellKind::kGru;
  const auto d = static_cast<Index>(read_u32(is));
  const auto k = static_cast<Index>(read_u32(is));
  const auto c = static_cast<Index>(read_u32(is));
  if (!is || d < 1 || k < 1 || c < 2) {
    fail(ErrorCode::kSchema, "'" + path + "': bad model dimensions");
  }

  CellParams params = CellParams::zeros(kind, d, k, c);
  for (GateBlock& g : params.gates) {
    read_block(is, g.w.data(), g.w.size());
    read_block(is, g.u.data(), g.u.size());
    read_block(is, g.b.data(), g.b.size());
  }
  read_block(is, params.readout_w.data(), params.readout_w.size());
  read_block(is, params.readout_b.data(), params.readout_b.size());
  if (!is) fail(ErrorCode::kSchema, "'" + path + "': truncated model file");
  is.peek();
  if (!is.eof()) fail(ErrorCode::kSchema, "'" + path + "': trailing bytes after model data");
  params.validate();
  return params;
}

}  // namespace rcgrf
