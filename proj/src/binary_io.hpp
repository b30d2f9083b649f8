#pragma once

#include "gdrom/errors.hpp"
#include "gdrom/types.hpp"

#include <bit>
#include <filesystem>
#include <istream>
#include <ostream>

static_assert(std::endian::native == std::endian::little, "binary artifacts assume a little-endian host");

namespace gdrom::detail {

template <class T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& in, const std::filesystem::path& path) {
  T v;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) throw IoError("truncated file " + path.string());
  return v;
}

template <class Derived>
void put_block(std::ostream& out, const Eigen::DenseBase<Derived>& m) {
  out.write(reinterpret_cast<const char*>(m.derived().data()), static_cast<std::streamsize>(m.size() * sizeof(double)));
}

template <class Derived>
void get_block(std::istream& in, Eigen::DenseBase<Derived>& m, const std::filesystem::path& path) {
  if (!in.read(reinterpret_cast<char*>(m.derived().data()), static_cast<std::streamsize>(m.size() * sizeof(double))))
    throw IoError("truncated file " + path.string());
}

}  // namespace gdrom::detail
