#include <bit>
#include <cstring>

#include "common/text.hpp"
#include "musup/eeg_core.hpp"
#include "musup/error.hpp"

namespace musup {
namespace {

constexpr char kMagic[4] = {'E', 'E', 'G', 'B'};

template <typename T>
void put_le(std::string& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((value >> (8 * i)) & 0xFF));
  }
}

class Reader {
 public:
  Reader(std::string_view bytes, std::string where) : bytes_(bytes), where_(std::move(where)) {}

  template <typename T>
  T get_le(std::size_t total_expected = 0) {
    require(sizeof(T), total_expected);
    T value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      value |= static_cast<T>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(T);
    return value;
  }

  double get_f64(std::size_t total_expected = 0) {
    return std::bit_cast<double>(get_le<std::uint64_t>(total_expected));
  }

  std::string get_string(std::size_t length) {
    require(length, 0);
    std::string s(bytes_.substr(pos_, length));
    pos_ += length;
    return s;
  }

  [[nodiscard]] std::size_t position() const { return pos_; }
  [[nodiscard]] std::size_t size() const { return bytes_.size(); }

 private:
  void require(std::size_t n, std::size_t total_expected) const {
    if (pos_ + n <= bytes_.size()) return;
    const auto expected = total_expected != 0 ? total_expected : pos_ + n;
    throw DataError(where_ + ": truncated file, expected " + std::to_string(expected) +
                    " bytes, got " + std::to_string(bytes_.size()));
  }

  std::string_view bytes_;
  std::string where_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<Epoch> load_binary(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw DataError("missing file '" + path.string() + "'");
  const std::string bytes = detail::read_file(path);
  const std::string where = "'" + path.string() + "'";
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw DataError(where + ": bad magic, expected \"EEGB\"");
  }
  Reader reader(std::string_view(bytes).substr(4), where);
  const auto channels = reader.get_le<std::uint32_t>();
  const auto n_samples = reader.get_le<std::uint32_t>();
  const double rate = reader.get_f64();
  std::vector<std::string> names;
  names.reserve(channels);
  for (std::uint32_t c = 0; c < channels; ++c) {
    const auto len = reader.get_le<std::uint16_t>();
    names.push_back(reader.get_string(len));
  }
  const std::size_t count = static_cast<std::size_t>(channels) * n_samples;
  const std::size_t expected = 4 + reader.position() + count * 8;
  if (bytes.size() < expected) {
    throw DataError(where + ": truncated payload, expected " + std::to_string(expected) +
                    " bytes, got " + std::to_string(bytes.size()));
  }
  std::vector<double> samples(count);
  for (auto& v : samples) v = reader.get_f64(expected);

  std::vector<Epoch> out;
  out.push_back(Epoch{MultichannelRecord(std::move(samples), n_samples, rate, std::move(names)),
                      std::nullopt, "", path.stem().string()});
  return out;
}

void save_binary(const MultichannelRecord& record, const std::filesystem::path& path) {
  std::string out(kMagic, 4);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(record.n_channels()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(record.n_samples()));
  put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(record.sample_rate()));
  for (const auto& name : record.channel_names()) {
    if (name.size() > 0xFFFF) throw DataError("channel name too long: '" + name + "'");
    put_le<std::uint16_t>(out, static_cast<std::uint16_t>(name.size()));
    out += name;
  }
  for (const double v : record.samples()) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
  detail::write_file_atomic(path, out);
}

}  // namespace musup
