#include "gdrom/snapshots.hpp"

#include "binary_io.hpp"

#include <cstring>

namespace gdrom {

namespace {

constexpr char kMagic[4] = {'G', 'D', 'S', 'N'};
constexpr std::uint32_t kVersion = 1;
constexpr std::streamoff kCountOffset = 8;
constexpr std::streamoff kFirstTimeOffset = 32;

using detail::get;
using detail::put;

}  // namespace

std::vector<real> SnapshotSet::times() const {
  std::vector<real> t(count());
  for (Index j = 0; j < count(); ++j) t[j] = time(j);
  return t;
}

SnapshotSet SnapshotSet::leading(Index n) const {
  if (n < 1 || n > count()) throw std::invalid_argument("SnapshotSet::leading: count out of range");
  return {data.leftCols(n), dt, t_first};
}

void save_snapshots(const std::filesystem::path& path, const SnapshotSet& set) {
  SnapshotWriter w(path, set.n_dofs(), set.dt);
  for (Index j = 0; j < set.count(); ++j) w.append(set.time(j), set.data.col(j));
  w.close();
}

SnapshotSet load_snapshots(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open snapshot file " + path.string());
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw IoError("bad snapshot magic in " + path.string());
  if (get<std::uint32_t>(in, path) != kVersion) throw IoError("unsupported snapshot version in " + path.string());
  const auto m = get<std::uint64_t>(in, path);
  const auto n = get<std::uint64_t>(in, path);
  SnapshotSet set;
  set.dt = get<double>(in, path);
  set.t_first = get<double>(in, path);
  set.data.resize(static_cast<Index>(n), static_cast<Index>(m));
  detail::get_block(in, set.data, path);
  return set;
}

SnapshotWriter::SnapshotWriter(const std::filesystem::path& path, Index n_dofs, real dt)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc), n_dofs_(n_dofs), dt_(dt) {
  if (!out_) throw IoError("cannot write snapshot file " + path.string());
  out_.write(kMagic, 4);
  put(out_, kVersion);
  put(out_, std::uint64_t{0});
  put(out_, static_cast<std::uint64_t>(n_dofs));
  put(out_, dt_);
  put(out_, 0.0);
}

SnapshotWriter::~SnapshotWriter() {
  try {
    close();
  } catch (...) {
  }
}

void SnapshotWriter::append(real time, const VectorX& u) {
  if (u.size() != n_dofs_) throw std::invalid_argument("SnapshotWriter: size mismatch");
  if (count_ == 0) {
    out_.seekp(kFirstTimeOffset);
    put(out_, time);
    out_.seekp(0, std::ios::end);
  }
  detail::put_block(out_, u);
  ++count_;
  if (!out_) throw IoError("write failed for " + path_.string());
}

void SnapshotWriter::close() {
  if (!out_.is_open()) return;
  out_.seekp(kCountOffset);
  put(out_, static_cast<std::uint64_t>(count_));
  out_.close();
  if (out_.fail()) throw IoError("write failed for " + path_.string());
}

}  // namespace gdrom
