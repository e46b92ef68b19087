#include "cfpc/dataset.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace cfpc {

namespace {

constexpr char kMagic[4] = {'C', 'F', 'D', '1'};

void write_u32(std::ostream& os, std::uint32_t v) {
  unsigned char buf[4];
  for (int i = 0; i < 4; ++i) buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
  os.write(reinterpret_cast<const char*>(buf), 4);
}

std::uint32_t read_u32(std::istream& is) {
  unsigned char buf[4];
  is.read(reinterpret_cast<char*>(buf), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf[i]) << (8 * i);
  return v;
}

} // namespace

void save_dataset(const std::string& path, const Dataset& ds) {
  if (ds.X.size() != ds.Y.size())
    throw std::invalid_argument("save_dataset: feature/label row count mismatch");
  {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("save_dataset: cannot open " + path);
    os.write(kMagic, 4);
    write_u32(os, static_cast<std::uint32_t>(ds.rows()));
    write_u32(os, static_cast<std::uint32_t>(ds.in_cols()));
    write_u32(os, static_cast<std::uint32_t>(ds.out_cols()));
    for (int r = 0; r < ds.rows(); ++r) {
      os.write(reinterpret_cast<const char*>(ds.X[r].data()),
               static_cast<std::streamsize>(ds.X[r].size() * sizeof(double)));
      os.write(reinterpret_cast<const char*>(ds.Y[r].data()),
               static_cast<std::streamsize>(ds.Y[r].size() * sizeof(double)));
    }
    if (!os) {
      os.close();
      std::remove(path.c_str());
      throw std::runtime_error("save_dataset: write failed for " + path);
    }
  }
}

Dataset load_dataset(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("load_dataset: cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("load_dataset: bad magic in " + path);
  const std::uint32_t rows = read_u32(is);
  const std::uint32_t in_cols = read_u32(is);
  const std::uint32_t out_cols = read_u32(is);
  if (!is) throw std::runtime_error("load_dataset: truncated header in " + path);
  Dataset ds;
  ds.X.assign(rows, RVec(in_cols));
  ds.Y.assign(rows, RVec(out_cols));
  for (std::uint32_t r = 0; r < rows; ++r) {
    is.read(reinterpret_cast<char*>(ds.X[r].data()),
            static_cast<std::streamsize>(in_cols * sizeof(double)));
    is.read(reinterpret_cast<char*>(ds.Y[r].data()),
            static_cast<std::streamsize>(out_cols * sizeof(double)));
  }
  if (!is) throw std::runtime_error("load_dataset: truncated data in " + path);
  return ds;
}

SplitIndices split_indices(int n) {
  SplitIndices s;
  const int n_train = static_cast<int>(n * 0.8);
  const int n_val = static_cast<int>(n * 0.9) - n_train;
  for (int i = 0; i < n_train; ++i) s.train.push_back(i);
  for (int i = n_train; i < n_train + n_val; ++i) s.val.push_back(i);
  for (int i = n_train + n_val; i < n; ++i) s.test.push_back(i);
  return s;
}

} // namespace cfpc
