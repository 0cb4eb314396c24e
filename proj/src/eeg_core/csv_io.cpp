#include <sstream>

#include "common/text.hpp"
#include "musup/eeg_core.hpp"
#include "musup/error.hpp"

namespace musup {
namespace {

std::optional<double> parse_fs_comment(std::string_view line) {
  // "# fs=512"
  line = detail::trim(line.substr(1));
  if (line.substr(0, 3) != "fs=") return std::nullopt;
  return detail::parse_double(line.substr(3));
}

}  // namespace

std::vector<Epoch> load_csv(const std::filesystem::path& path,
                            std::optional<double> sample_rate_override) {
  if (!std::filesystem::exists(path)) throw DataError("missing file '" + path.string() + "'");
  const std::string text = detail::read_file(path);
  const std::string where = "'" + path.string() + "'";

  std::optional<double> file_rate;
  std::vector<std::string> names;
  std::vector<double> samples;
  std::size_t rows = 0;
  bool have_header = false;

  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = detail::trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (!have_header) {
        if (auto fs = parse_fs_comment(line)) file_rate = fs;
      }
      continue;
    }
    const auto cells = detail::split(line, ',');
    if (!have_header) {
      if (cells.size() < 2 || detail::trim(cells[0]) != "time") {
        throw DataError(where + ": header must be 'time,<channel>,...'");
      }
      for (std::size_t c = 1; c < cells.size(); ++c) names.emplace_back(detail::trim(cells[c]));
      have_header = true;
      continue;
    }
    if (cells.size() != names.size() + 1) {
      throw DataError(where + ": line " + std::to_string(line_no) + " has " +
                      std::to_string(cells.size()) + " cells, expected " +
                      std::to_string(names.size() + 1));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto value = detail::parse_double(cells[c]);
      if (!value) {
        const std::string column = c == 0 ? "time" : names[c - 1];
        throw DataError(where + ": non-numeric value at line " + std::to_string(line_no) +
                        ", column " + std::to_string(c + 1) + " ('" + column + "')");
      }
      if (c > 0) samples.push_back(*value);
    }
    ++rows;
  }
  if (!have_header) throw DataError(where + ": missing header");

  const auto rate = sample_rate_override ? sample_rate_override : file_rate;
  if (!rate) throw DataError(where + ": missing sample rate ('# fs=<Hz>' line or override)");

  Epoch epoch{MultichannelRecord(std::move(samples), rows, *rate, std::move(names)), std::nullopt,
              "", path.stem().string()};
  std::vector<Epoch> out;
  out.push_back(std::move(epoch));
  return out;
}

void save_csv(const MultichannelRecord& record, const std::filesystem::path& path) {
  std::string out;
  out += "# fs=" + detail::format_double(record.sample_rate()) + "\n";
  out += "time";
  for (const auto& name : record.channel_names()) out += "," + name;
  out += "\n";
  for (std::size_t n = 0; n < record.n_samples(); ++n) {
    out += detail::format_double(static_cast<double>(n) / record.sample_rate());
    for (std::size_t m = 0; m < record.n_channels(); ++m) {
      out += ',';
      out += detail::format_double(record.at(n, m));
    }
    out += '\n';
  }
  detail::write_file_atomic(path, out);
}

}  // namespace musup
