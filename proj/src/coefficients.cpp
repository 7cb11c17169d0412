#include "shiftconv/coefficients.hpp"

#include <fcntl.h>
#include <sys/mman.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace shiftconv {

namespace {

using u128 = unsigned __int128;

constexpr u64 kMaxStream = 1'000'000;
constexpr u64 kCacheMagic = 0x31564E4F43464853ULL;  // "SHFCONV1"

void check_length(u64 n, const char* what) {
  if (n == 0 || n > kMaxStream) {
    throw std::invalid_argument(std::string(what) + ": length must be in [1, 1e6]");
  }
}

// Sparse series of prod (1 - q^n)^3 = sum_k (-1)^k (2k+1) q^{k(k+1)/2}.
std::vector<std::pair<u64, i64>> eta_cubed_terms(u64 limit) {
  std::vector<std::pair<u64, i64>> terms;
  for (u64 k = 0;; ++k) {
    const u64 e = k * (k + 1) / 2;
    if (e > limit) break;
    terms.emplace_back(e, (k % 2 == 0 ? 1 : -1) * static_cast<i64>(2 * k + 1));
  }
  return terms;
}

u64 fnv1a(const unsigned char* data, std::size_t len) {
  u64 h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= data[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

bool exact_kind(StreamKind kind) { return kind == StreamKind::Gl3Tau3Proxy; }

struct CacheHeader {
  u64 magic;
  u64 kind;
  u64 n;
  u64 checksum;
};
static_assert(sizeof(CacheHeader) == 32);

class MappedFile {
 public:
  explicit MappedFile(const std::filesystem::path& path) {
    fd_ = ::open(path.c_str(), O_RDONLY);
    if (fd_ < 0) throw std::runtime_error("cannot open " + path.string());
    struct stat st {};
    if (::fstat(fd_, &st) != 0) {
      ::close(fd_);
      throw std::runtime_error("cannot stat " + path.string());
    }
    size_ = static_cast<std::size_t>(st.st_size);
    if (size_ > 0) {
      void* p = ::mmap(nullptr, size_, PROT_READ, MAP_PRIVATE, fd_, 0);
      if (p == MAP_FAILED) {
        ::close(fd_);
        throw std::runtime_error("cannot map " + path.string());
      }
      data_ = static_cast<const unsigned char*>(p);
    }
  }
  ~MappedFile() {
    if (data_) ::munmap(const_cast<unsigned char*>(data_), size_);
    if (fd_ >= 0) ::close(fd_);
  }
  MappedFile(const MappedFile&) = delete;
  MappedFile& operator=(const MappedFile&) = delete;

  const unsigned char* data() const { return data_; }
  std::size_t size() const { return size_; }

 private:
  int fd_ = -1;
  const unsigned char* data_ = nullptr;
  std::size_t size_ = 0;
};

}  // namespace

std::string_view to_string(StreamKind kind) {
  switch (kind) {
    case StreamKind::Gl2HolomorphicDelta: return "gl2-holomorphic-delta";
    case StreamKind::Gl3Sym2Lift: return "gl3-sym2-lift";
    case StreamKind::Gl3Tau3Proxy: return "gl3-tau3-proxy";
    case StreamKind::Custom: return "custom";
  }
  return "unknown";
}

StreamKind stream_kind_from_string(std::string_view name) {
  if (name == "gl2" || name == "gl2-holomorphic-delta") return StreamKind::Gl2HolomorphicDelta;
  if (name == "sym2" || name == "gl3-sym2-lift") return StreamKind::Gl3Sym2Lift;
  if (name == "tau3" || name == "gl3-tau3-proxy") return StreamKind::Gl3Tau3Proxy;
  throw std::invalid_argument("unknown stream kind: " + std::string(name));
}

CoefficientStream::CoefficientStream(StreamKind kind, std::vector<double> values, std::string provenance)
    : kind_(kind), values_(std::move(values)), provenance_(std::move(provenance)) {}

double CoefficientStream::at(u64 n) const {
  if (n == 0 || n > values_.size()) {
    throw std::out_of_range("coefficient index " + std::to_string(n) + " outside [1, " +
                            std::to_string(values_.size()) + "]");
  }
  return values_[n - 1];
}

std::vector<i128> ramanujan_tau(u64 n_max) {
  check_length(n_max, "ramanujan_tau");
  // tau(n) is the coefficient of q^{n-1} in (prod (1 - q^k)^3)^8.  Arithmetic
  // wraps modulo 2^128, which is exact because every |tau(n)| < 2^127.
  const u64 len = n_max;
  const auto sparse = eta_cubed_terms(len - 1);
  std::vector<u128> acc(len, 0);
  for (const auto& [e1, c1] : sparse) {
    for (const auto& [e2, c2] : sparse) {
      if (e1 + e2 >= len) break;
      acc[e1 + e2] += static_cast<u128>(static_cast<i128>(c1 * c2));
    }
  }
  std::vector<u128> next(len);
  for (int step = 0; step < 6; ++step) {
    std::fill(next.begin(), next.end(), 0);
    for (const auto& [e, c] : sparse) {
      const u128 cc = static_cast<u128>(static_cast<i128>(c));
      u128* out = next.data() + e;
      const u128* in = acc.data();
      const u64 count = len - e;
      for (u64 i = 0; i < count; ++i) out[i] += cc * in[i];
    }
    acc.swap(next);
  }
  std::vector<i128> tau(len);
  for (u64 i = 0; i < len; ++i) tau[i] = static_cast<i128>(acc[i]);
  return tau;
}

std::string to_string(i128 v) {
  if (v == 0) return "0";
  const bool neg = v < 0;
  u128 u = neg ? static_cast<u128>(-(v + 1)) + 1 : static_cast<u128>(v);
  std::string s;
  while (u > 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
    u /= 10;
  }
  if (neg) s.push_back('-');
  std::reverse(s.begin(), s.end());
  return s;
}

CoefficientStream lambda_gl2(u64 n_max) {
  const auto tau = ramanujan_tau(n_max);
  std::vector<double> values(n_max);
  for (u64 n = 1; n <= n_max; ++n) {
    const long double t = static_cast<long double>(tau[n - 1]);
    values[n - 1] = static_cast<double>(t / std::pow(static_cast<long double>(n), 5.5L));
  }
  return {StreamKind::Gl2HolomorphicDelta, std::move(values),
          "weight-12 level-1 cusp form, tau(n)/n^5.5"};
}

CoefficientStream sym2_lift(u64 n_max) {
  check_length(n_max, "sym2_lift");
  return sym2_lift(lambda_gl2(n_max), n_max);
}

CoefficientStream sym2_lift(const CoefficientStream& gl2, u64 n_max) {
  check_length(n_max, "sym2_lift");
  if (gl2.size() < n_max) throw std::invalid_argument("sym2_lift: gl2 stream too short");
  // Smallest-prime-factor sieve, then multiplicative assembly from prime powers.
  std::vector<u64> spf(n_max + 1, 0);
  for (u64 i = 2; i <= n_max; ++i) {
    if (spf[i] != 0) continue;
    for (u64 j = i; j <= n_max; j += i) {
      if (spf[j] == 0) spf[j] = i;
    }
  }
  std::vector<double> values(n_max, 0.0);
  values[0] = 1.0;
  std::vector<double> even_powers;  // lambda_2(p^{2i})
  std::vector<double> lifted;       // A(1, p^k)
  for (u64 n = 2; n <= n_max; ++n) {
    const u64 p = spf[n];
    u64 rest = n, k = 0;
    while (rest % p == 0) {
      rest /= p;
      ++k;
    }
    if (rest != 1) {
      values[n - 1] = values[rest - 1] * values[n / rest - 1];
      continue;
    }
    // n = p^k.  Hecke recursion lambda(p^{r+1}) = lambda(p) lambda(p^r) - lambda(p^{r-1}).
    const double lp = gl2(p);
    std::vector<double> powers{1.0, lp};
    for (u64 r = 1; r < 2 * k; ++r) powers.push_back(lp * powers[r] - powers[r - 1]);
    double a = 0.0;
    for (u64 j = 0; 2 * j <= k; ++j) a += powers[2 * (k - 2 * j)];
    values[n - 1] = a;
  }
  return {StreamKind::Gl3Sym2Lift, std::move(values),
          "symmetric-square lift of the weight-12 level-1 cusp form"};
}

CoefficientStream tau3(u64 n_max) {
  check_length(n_max, "tau3");
  std::vector<u64> d(n_max + 1, 0);
  for (u64 a = 1; a <= n_max; ++a) {
    for (u64 m = a; m <= n_max; m += a) ++d[m];
  }
  std::vector<u64> t3(n_max + 1, 0);
  for (u64 a = 1; a <= n_max; ++a) {
    for (u64 m = a, b = 1; m <= n_max; m += a, ++b) t3[m] += d[b];
  }
  std::vector<double> values(n_max);
  for (u64 n = 1; n <= n_max; ++n) values[n - 1] = static_cast<double>(t3[n]);
  return {StreamKind::Gl3Tau3Proxy, std::move(values), "ternary divisor function"};
}

CoefficientStream constant_stream(u64 n_max, double value) {
  return {StreamKind::Custom, std::vector<double>(n_max, value), "constant"};
}

double lambda1_full(u64 m1, u64 m2, const CoefficientStream& stream) {
  if (m1 == 0 || m2 == 0 || m1 > stream.size() || m2 > stream.size()) {
    throw std::out_of_range("lambda1_full: indices (" + std::to_string(m1) + ", " +
                            std::to_string(m2) + ") outside the stream");
  }
  const u64 g = gcd(m1, m2);
  double sum = 0.0;
  for (u64 d = 1; d <= g; ++d) {
    if (g % d != 0) continue;
    const int mu = mobius(d);
    if (mu == 0) continue;
    sum += mu * stream(m1 / d) * stream(m2 / d);
  }
  return sum;
}

SumReport second_moment_check(const CoefficientStream& stream, u64 n_max) {
  if (n_max == 0 || n_max > stream.size()) {
    throw std::out_of_range("second_moment_check: N outside the stream");
  }
  std::vector<u64> ladder;
  for (u64 n = n_max; n >= 64 || ladder.empty(); n /= 2) {
    ladder.push_back(n);
    if (n < 128) break;
  }
  std::reverse(ladder.begin(), ladder.end());

  nlohmann::json rungs = nlohmann::json::array();
  double sum = 0.0, prev_ratio = 0.0, worst = 0.0;
  u64 done = 0;
  bool ok = true;
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    for (; done < ladder[i]; ++done) sum += stream.values()[done] * stream.values()[done];
    const double ratio = sum / static_cast<double>(ladder[i]);
    worst = std::max(worst, ratio);
    if (ratio > 100.0) ok = false;
    if (i > 0 && ratio > 2.5 * prev_ratio) ok = false;
    rungs.push_back({{"N", ladder[i]}, {"ratio", ratio}});
    prev_ratio = ratio;
  }
  SumReport r;
  r.name = "second_moment";
  r.value = prev_ratio;
  r.bound = 100.0;
  r.ratio = worst;
  r.pass = ok;
  r.params = {{"kind", to_string(stream.kind())}, {"N", n_max}, {"ladder", rungs}};
  return r;
}

CoefficientStream build_stream(StreamKind kind, u64 n) {
  switch (kind) {
    case StreamKind::Gl2HolomorphicDelta: return lambda_gl2(n);
    case StreamKind::Gl3Sym2Lift: return sym2_lift(n);
    case StreamKind::Gl3Tau3Proxy: return tau3(n);
    case StreamKind::Custom: break;
  }
  throw std::invalid_argument("build_stream: custom streams cannot be built");
}

StreamCache::StreamCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::filesystem::path StreamCache::file_for(StreamKind kind, u64 n) const {
  return dir_ / (std::string(to_string(kind)) + "-" + std::to_string(n) + ".bin");
}

CoefficientStream StreamCache::get(StreamKind kind, u64 n) {
  const auto file = file_for(kind, n);
  if (std::filesystem::exists(file)) {
    try {
      return read(file);
    } catch (const std::runtime_error&) {
      // Corrupt or stale entry: rebuild below.
    }
  }
  auto stream = build_stream(kind, n);
  std::filesystem::create_directories(dir_);
  write(file, stream);
  return stream;
}

void StreamCache::write(const std::filesystem::path& file, const CoefficientStream& stream) {
  const u64 n = stream.size();
  std::vector<unsigned char> payload(n * 8);
  if (exact_kind(stream.kind())) {
    for (u64 i = 0; i < n; ++i) {
      const auto v = static_cast<std::int64_t>(std::llround(stream.values()[i]));
      std::memcpy(payload.data() + 8 * i, &v, 8);
    }
  } else {
    std::memcpy(payload.data(), stream.values().data(), n * 8);
  }
  const CacheHeader header{kCacheMagic, static_cast<u64>(stream.kind()), n,
                           fnv1a(payload.data(), payload.size())};
  auto tmp = file;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(&header), sizeof header);
    out.write(reinterpret_cast<const char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, file);
}

CoefficientStream StreamCache::read(const std::filesystem::path& file) {
  const MappedFile map(file);
  if (map.size() < sizeof(CacheHeader)) throw std::runtime_error("truncated cache file " + file.string());
  CacheHeader header{};
  std::memcpy(&header, map.data(), sizeof header);
  if (header.magic != kCacheMagic) throw std::runtime_error("bad magic in " + file.string());
  if (map.size() != sizeof(CacheHeader) + header.n * 8) {
    throw std::runtime_error("size mismatch in " + file.string());
  }
  const unsigned char* payload = map.data() + sizeof(CacheHeader);
  if (fnv1a(payload, header.n * 8) != header.checksum) {
    throw std::runtime_error("checksum mismatch in " + file.string());
  }
  const auto kind = static_cast<StreamKind>(header.kind);
  std::vector<double> values(header.n);
  if (exact_kind(kind)) {
    for (u64 i = 0; i < header.n; ++i) {
      std::int64_t v;
      std::memcpy(&v, payload + 8 * i, 8);
      values[i] = static_cast<double>(v);
    }
  } else {
    std::memcpy(values.data(), payload, header.n * 8);
  }
  return {kind, std::move(values), "cache:" + file.filename().string()};
}

}  // namespace shiftconv
