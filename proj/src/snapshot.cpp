#include "obstacle/snapshot.hpp"

#include "obstacle/config_io.hpp"
#include "obstacle/errors.hpp"
#include "obstacle/solver.hpp"

#include <zlib.h>

#include <bit>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

namespace obstacle {

namespace fs = std::filesystem;

namespace {

constexpr char kMagic[4] = {'O', 'B', 'S', '1'};
constexpr std::size_t kHeaderSize = 4 + 2 + 1 + 8 + 3 * 8;

template <class U>
void put_le(std::vector<std::uint8_t>& out, U value) {
  for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(std::uint8_t(value >> (8 * i)));
}

template <class U>
U get_le(const std::uint8_t* p) {
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= U(p[i]) << (8 * i);
  return v;
}

void put_f64(std::vector<std::uint8_t>& out, double d) { put_le(out, std::bit_cast<std::uint64_t>(d)); }
double get_f64(const std::uint8_t* p) { return std::bit_cast<double>(get_le<std::uint64_t>(p)); }

std::string snapshot_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snap_%06zu.obs", index);
  return buf;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::uint32_t crc32_of(const void* data, std::size_t size) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  const auto* p = static_cast<const Bytef*>(data);
  while (size > 0) {
    const auto chunk = uInt(std::min<std::size_t>(size, 1u << 30));
    crc = ::crc32(crc, p, chunk);
    p += chunk;
    size -= chunk;
  }
  return std::uint32_t(crc);
}

std::string config_hash(const std::string& text) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%08x", crc32_of(text.data(), text.size()));
  return buf;
}

std::vector<std::uint8_t> encode_snapshot(const Snapshot& snap) {
  const auto& s = snap.state;
  const std::size_t n = s.u.size();
  if (s.w.size() != n || s.v.size() != n) throw DomainError("snapshot fields differ in length");
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderSize + 24 * n + 4);
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put_le<std::uint16_t>(out, kSnapshotVersion);
  out.push_back(snap.mode == ObstacleMode::One ? 0 : 1);
  put_le<std::uint64_t>(out, n);
  put_f64(out, snap.half_width);
  put_f64(out, s.t);
  put_f64(out, snap.epsilon);
  for (const auto* field : {&s.u, &s.w, &s.v})
    for (double d : *field) put_f64(out, d);
  put_le<std::uint32_t>(out, crc32_of(out.data(), out.size()));
  return out;
}

Snapshot decode_snapshot(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < kHeaderSize + 4) throw FormatError("snapshot truncated: header incomplete");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("not a snapshot file (bad magic)");
  const auto version = get_le<std::uint16_t>(bytes.data() + 4);
  if (version != kSnapshotVersion)
    throw FormatError("snapshot version mismatch: file has " + std::to_string(version) + ", reader supports " +
                      std::to_string(kSnapshotVersion));
  const std::uint8_t mode = bytes[6];
  const auto n = get_le<std::uint64_t>(bytes.data() + 7);
  if (n > (bytes.size() - kHeaderSize) / 24 || bytes.size() != kHeaderSize + 24 * n + 4)
    throw FormatError("snapshot truncated or oversized: expected " + std::to_string(n) + " nodes");
  const std::size_t body = kHeaderSize + 24 * n;
  const auto stored = get_le<std::uint32_t>(bytes.data() + body);
  if (stored != crc32_of(bytes.data(), body)) throw FormatError("snapshot CRC mismatch");
  if (mode > 1) throw FormatError("snapshot has unknown obstacle mode " + std::to_string(mode));

  Snapshot snap;
  snap.mode = mode == 0 ? ObstacleMode::One : ObstacleMode::Two;
  snap.half_width = get_f64(bytes.data() + 15);
  snap.state.t = get_f64(bytes.data() + 23);
  snap.epsilon = get_f64(bytes.data() + 31);
  const std::uint8_t* p = bytes.data() + kHeaderSize;
  for (auto* field : {&snap.state.u, &snap.state.w, &snap.state.v}) {
    field->resize(n);
    for (std::size_t i = 0; i < n; ++i, p += 8) (*field)[i] = get_f64(p);
  }
  return snap;
}

void write_snapshot(const std::string& path, const Snapshot& snap) {
  const auto bytes = encode_snapshot(snap);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write snapshot '" + path + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
  if (!out) throw FormatError("short write to snapshot '" + path + "'");
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open snapshot '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_snapshot(bytes);
}

void export_trajectory(const Trajectory& traj, const std::string& dir) {
  fs::create_directories(dir);
  const std::string cfg = emit_config(traj.config);
  {
    std::ofstream out(fs::path(dir) / "effective.cfg");
    out << cfg;
  }
  std::ofstream manifest(fs::path(dir) / "manifest.txt");
  if (!manifest) throw FormatError("cannot write manifest in '" + dir + "'");
  manifest << "# obstacle-string trajectory\n"
           << "config_hash " << config_hash(cfg) << "\n"
           << "records " << traj.records.size() << "\n"
           << "steps " << traj.steps << "\n"
           << "max_wave_speed " << fmt17(traj.max_wave_speed) << "\n"
           << "# index time dissipation file\n";
  for (std::size_t k = 0; k < traj.records.size(); ++k) {
    const std::string name = snapshot_name(k);
    write_snapshot((fs::path(dir) / name).string(),
                   Snapshot{traj.config.mode, traj.config.half_width, traj.config.epsilon, traj.records[k]});
    manifest << k << " " << fmt17(traj.records[k].t) << " " << fmt17(traj.dissipation[k]) << " " << name << "\n";
  }
}

Trajectory import_trajectory(const std::string& dir) {
  std::ifstream manifest(fs::path(dir) / "manifest.txt");
  if (!manifest) throw FormatError("no manifest in '" + dir + "'");

  Trajectory traj;
  traj.config = load_config((fs::path(dir) / "effective.cfg").string());
  std::ifstream cfg_in(fs::path(dir) / "effective.cfg");
  const std::string cfg_text((std::istreambuf_iterator<char>(cfg_in)), std::istreambuf_iterator<char>());
  std::string line;
  std::size_t expected = 0;
  while (std::getline(manifest, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::string head;
    row >> head;
    if (head == "config_hash") {
      std::string hash;
      row >> hash;
      if (hash != config_hash(cfg_text)) throw FormatError("trajectory config hash does not match effective.cfg");
    } else if (head == "records") {
      row >> expected;
    } else if (head == "steps") {
      row >> traj.steps;
    } else if (head == "max_wave_speed") {
      std::string v;
      row >> v;
      traj.max_wave_speed = std::strtod(v.c_str(), nullptr);
    } else {
      std::string t, d, name;
      row >> t >> d >> name;
      if (name.empty()) throw FormatError("malformed manifest line: " + line);
      Snapshot snap = read_snapshot((fs::path(dir) / name).string());
      if (snap.state.size() != traj.config.cells) throw FormatError("snapshot " + name + " does not match the grid");
      traj.records.push_back(std::move(snap.state));
      traj.dissipation.push_back(std::strtod(d.c_str(), nullptr));
    }
  }
  if (traj.records.size() != expected)
    throw FormatError("manifest lists " + std::to_string(expected) + " records, found " +
                      std::to_string(traj.records.size()));
  const StressLaw law = traj.config.law.build();
  const double dx = traj.grid().dx();
  for (std::size_t k = 0; k < traj.records.size(); ++k)
    traj.energy.push_back(
        energy_ledger(traj.records[k], dx, law, traj.config.eps_pen(), traj.config.mode, traj.dissipation[k]));
  return traj;
}

}  // namespace obstacle
