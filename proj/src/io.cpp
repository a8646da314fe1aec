#include "mp/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace mp {

namespace {

// Reads one whitespace-separated PGM header token, skipping '#' comments.
std::string next_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  if (tok.empty()) throw std::runtime_error("pgm: truncated header");
  return tok;
}

int parse_int(const std::string& tok, const char* what) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(std::string("pgm: bad ") + what + " '" + tok + "'");
  }
}

}  // namespace

GrayImage load_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("pgm: cannot open " + path);

  const std::string magic = next_token(in);
  if (magic != "P2" && magic != "P5") throw std::runtime_error("pgm: unsupported magic " + magic);
  const int w = parse_int(next_token(in), "width");
  const int h = parse_int(next_token(in), "height");
  const int maxval = parse_int(next_token(in), "maxval");
  if (w < 1 || h < 1 || maxval < 1 || maxval > 65535)
    throw std::runtime_error("pgm: invalid dimensions or maxval");

  GrayImage img;
  img.height = h;
  img.width = w;
  img.pixels.resize(static_cast<std::size_t>(h) * w);

  if (magic == "P2") {
    for (auto& px : img.pixels) {
      const int v = parse_int(next_token(in), "sample");
      if (v < 0 || v > maxval) throw std::runtime_error("pgm: sample out of range");
      px = static_cast<std::uint16_t>(v);
    }
  } else {
    // The single whitespace byte after maxval was already consumed by next_token.
    const int bytes = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> raw(img.pixels.size() * bytes);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (in.gcount() != static_cast<std::streamsize>(raw.size()))
      throw std::runtime_error("pgm: truncated payload");
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
      const int v = bytes == 2 ? (raw[2 * i] << 8) | raw[2 * i + 1] : raw[i];
      if (v > maxval) throw std::runtime_error("pgm: sample out of range");
      img.pixels[i] = static_cast<std::uint16_t>(v);
    }
  }
  return img;
}

void save_pgm(const std::string& path, const GrayImage& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("pgm: cannot write " + path);
  out << "P5\n" << image.width << " " << image.height << "\n65535\n";
  std::vector<unsigned char> raw(image.pixels.size() * 2);
  for (std::size_t i = 0; i < image.pixels.size(); ++i) {
    raw[2 * i] = static_cast<unsigned char>(image.pixels[i] >> 8);
    raw[2 * i + 1] = static_cast<unsigned char>(image.pixels[i] & 0xff);
  }
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!out) throw std::runtime_error("pgm: write failed for " + path);
}

namespace detail {

namespace {

void put_u32le(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32le(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (in.gcount() != 4) throw std::runtime_error("cost volume: truncated header");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

void write_cost_volume_file(const std::string& path, int h, int w, int l, const float* data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cost volume: cannot write " + path);
  out.write("MPCV1", 5);
  put_u32le(out, static_cast<std::uint32_t>(h));
  put_u32le(out, static_cast<std::uint32_t>(w));
  put_u32le(out, static_cast<std::uint32_t>(l));
  const std::size_t count = static_cast<std::size_t>(h) * w * l;
  static_assert(sizeof(float) == 4);
  // Little-endian host assumed for the payload; the header is explicit.
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * 4));
  if (!out) throw std::runtime_error("cost volume: write failed for " + path);
}

std::vector<float> read_cost_volume_file(const std::string& path, int& h, int& w, int& l) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cost volume: cannot open " + path);
  char magic[5];
  in.read(magic, 5);
  if (in.gcount() != 5 || std::string(magic, 5) != "MPCV1")
    throw std::runtime_error("cost volume: bad magic in " + path);
  const std::uint32_t uh = get_u32le(in), uw = get_u32le(in), ul = get_u32le(in);
  if (uh == 0 || uw == 0 || ul == 0 || ul > 256)
    throw std::runtime_error("cost volume: invalid dimensions");
  h = static_cast<int>(uh);
  w = static_cast<int>(uw);
  l = static_cast<int>(ul);
  std::vector<float> data(static_cast<std::size_t>(h) * w * l);
  in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size() * 4));
  if (in.gcount() != static_cast<std::streamsize>(data.size() * 4))
    throw std::runtime_error("cost volume: truncated payload");
  for (float v : data)
    if (!std::isfinite(v)) throw std::runtime_error("cost volume: non-finite value");
  return data;
}

}  // namespace detail

void write_energy_csv(const std::string& path, const std::vector<EnergyRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("csv: cannot write " + path);
  out << "iteration,energy,forward_ms\n";
  char line[96];
  for (const auto& r : rows) {
    std::snprintf(line, sizeof(line), "%d,%.10g,%.6g\n", r.iteration, r.energy, r.forward_ms);
    out << line;
  }
  if (!out) throw std::runtime_error("csv: write failed for " + path);
}

}  // namespace mp
