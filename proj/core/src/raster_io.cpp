#include "regionplan/raster_io.hpp"

#include <cctype>
#include <fstream>
#include <iterator>
#include <string>

namespace regionplan {

namespace {

class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const auto c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(c)) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  int read_uint(const char* field) {
    skip_space_and_comments();
    long long value = 0;
    std::size_t digits = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > (1 << 24)) {
        throw Error(ErrorCode::kMalformedHeader, std::string(field) + " out of range");
      }
      ++pos_;
      ++digits;
    }
    if (digits == 0) {
      throw Error(ErrorCode::kMalformedHeader, std::string("missing ") + field);
    }
    return static_cast<int>(value);
  }

  // Exactly one whitespace byte separates maxval from the raster.
  void expect_single_space() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw Error(ErrorCode::kMalformedHeader, "expected whitespace after maxval");
    }
    ++pos_;
  }

  std::size_t position() const noexcept { return pos_; }
  void advance(std::size_t n) noexcept { pos_ += n; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::vector<std::uint8_t> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void dump(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

std::string header(char kind, int width, int height) {
  return std::string("P") + kind + "\n" + std::to_string(width) + " " +
         std::to_string(height) + "\n255\n";
}

}  // namespace

GreyImage parse_pgm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P') {
    throw Error(ErrorCode::kUnsupportedFormat, "not a netpbm file");
  }
  if (bytes[1] != '5') {
    throw Error(ErrorCode::kUnsupportedFormat,
                std::string("expected P5, got P") + static_cast<char>(bytes[1]));
  }
  HeaderReader reader(bytes);
  reader.advance(2);
  const int width = reader.read_uint("width");
  const int height = reader.read_uint("height");
  const int maxval = reader.read_uint("maxval");
  if (maxval != 255) {
    throw Error(ErrorCode::kMalformedHeader, "maxval must be 255, got " + std::to_string(maxval));
  }
  reader.expect_single_space();

  const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  const std::size_t start = reader.position();
  if (bytes.size() - start < n) {
    throw Error(ErrorCode::kTruncatedPayload, "expected " + std::to_string(n) + " pixels, found " +
                                                  std::to_string(bytes.size() - start));
  }
  return GreyImage(width, height, std::vector<std::uint8_t>(bytes.begin() + start,
                                                            bytes.begin() + start + n));
}

GreyImage read_pgm(const std::filesystem::path& path) { return parse_pgm(slurp(path)); }

std::vector<std::uint8_t> encode_pgm(const GreyImage& image) {
  const std::string head = header('5', image.width(), image.height());
  std::vector<std::uint8_t> out(head.begin(), head.end());
  out.insert(out.end(), image.cells().begin(), image.cells().end());
  return out;
}

void write_pgm(const std::filesystem::path& path, const GreyImage& image) {
  dump(path, encode_pgm(image));
}

void write_ppm(const std::filesystem::path& path, const RgbImage& image) {
  const std::string head = header('6', image.width(), image.height());
  std::vector<std::uint8_t> out(head.begin(), head.end());
  out.reserve(out.size() + image.size() * 3);
  for (const Rgb& px : image.cells()) {
    out.push_back(px.r);
    out.push_back(px.g);
    out.push_back(px.b);
  }
  dump(path, out);
}

}  // namespace regionplan
