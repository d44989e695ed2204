// Copyright 2026 The labelfuse Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "labelfuse/io.h"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>

#include "labelfuse/error.h"
#include "labelfuse/text_util.h"

namespace labelfuse {
namespace fs = std::filesystem;

namespace {

std::vector<std::uint8_t> ReadBinaryFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct PngWriteState {
  std::vector<std::uint8_t>* out;
};

void PngWriteCallback(png_structp png, png_bytep data, png_size_t length) {
  auto* state = static_cast<PngWriteState*>(png_get_io_ptr(png));
  state->out->insert(state->out->end(), data, data + length);
}

void PngFlushCallback(png_structp) {}

struct PngReadState {
  const std::uint8_t* data;
  std::size_t size;
  std::size_t offset;
};

void PngReadCallback(png_structp png, png_bytep out, png_size_t length) {
  auto* state = static_cast<PngReadState*>(png_get_io_ptr(png));
  if (state->offset + length > state->size) {
    png_error(png, "unexpected end of PNG data");
  }
  std::memcpy(out, state->data + state->offset, length);
  state->offset += length;
}

// Keeps libpng's longjmp away from frames with non-trivial destructors.
bool EncodeRaw(const Gray16Image& image, std::vector<std::uint8_t>* out,
               std::vector<png_bytep>* rows) {
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (png == nullptr) return false;
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    return false;
  }
  PngWriteState state{out};
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_set_write_fn(png, &state, PngWriteCallback, PngFlushCallback);
  png_set_compression_level(png, 6);
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width),
               static_cast<png_uint_32>(image.height), 16, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_set_swap(png);
  png_write_image(png, rows->data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

struct DecodedHeader {
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int bit_depth = 0;
  int color_type = 0;
};

bool DecodeRaw(PngReadState* state, DecodedHeader* header,
               std::vector<std::uint8_t>* buffer, char* message,
               std::size_t message_size) {
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (png == nullptr) return false;
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    std::snprintf(message, message_size, "corrupt PNG data");
    return false;
  }
  png_set_read_fn(png, state, PngReadCallback);
  png_read_info(png, info);
  header->width = png_get_image_width(png, info);
  header->height = png_get_image_height(png, info);
  header->bit_depth = png_get_bit_depth(png, info);
  header->color_type = png_get_color_type(png, info);
  if (header->color_type != PNG_COLOR_TYPE_GRAY) {
    png_destroy_read_struct(&png, &info, nullptr);
    std::snprintf(message, message_size,
                  "expected a single-channel grayscale PNG");
    return false;
  }
  if (header->bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (header->bit_depth == 16) png_set_swap(png);
  png_read_update_info(png, info);
  const png_size_t row_bytes = png_get_rowbytes(png, info);
  buffer->resize(row_bytes * header->height);
  for (png_uint_32 y = 0; y < header->height; ++y) {
    png_read_row(png, buffer->data() + y * row_bytes, nullptr);
  }
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

}  // namespace

std::vector<std::uint8_t> EncodePng16(const Gray16Image& image) {
  if (image.width <= 0 || image.height <= 0 ||
      image.pixels.size() !=
          static_cast<std::size_t>(image.width) * image.height) {
    throw InvalidArgument("cannot encode an empty or inconsistent image");
  }
  std::vector<std::uint16_t> copy = image.pixels;
  std::vector<png_bytep> rows(image.height);
  for (int y = 0; y < image.height; ++y) {
    rows[y] = reinterpret_cast<png_bytep>(copy.data() +
                                          static_cast<std::size_t>(y) *
                                              image.width);
  }
  std::vector<std::uint8_t> out;
  if (!EncodeRaw(image, &out, &rows)) throw IoError("PNG encoding failed");
  return out;
}

Gray16Image DecodePng16(std::span<const std::uint8_t> bytes,
                        const std::string& source) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
    throw IoError(source + ": not a PNG file");
  }
  PngReadState state{bytes.data(), bytes.size(), 0};
  DecodedHeader header;
  std::vector<std::uint8_t> buffer;
  char message[128] = "PNG decoding failed";
  if (!DecodeRaw(&state, &header, &buffer, message, sizeof(message))) {
    throw IoError(source + ": " + message);
  }
  Gray16Image image;
  image.width = static_cast<int>(header.width);
  image.height = static_cast<int>(header.height);
  const std::size_t n = static_cast<std::size_t>(image.width) * image.height;
  image.pixels.resize(n);
  if (header.bit_depth == 16) {
    std::memcpy(image.pixels.data(), buffer.data(), n * sizeof(std::uint16_t));
  } else {
    for (std::size_t i = 0; i < n; ++i) image.pixels[i] = buffer[i];
  }
  return image;
}

Gray16Image ReadPng16(const fs::path& path) {
  const auto bytes = ReadBinaryFile(path);
  return DecodePng16(bytes, path.string());
}

void WritePng16(const fs::path& path, const Gray16Image& image) {
  const auto bytes = EncodePng16(image);
  WriteFileAtomic(path, std::string_view(
                            reinterpret_cast<const char*>(bytes.data()),
                            bytes.size()));
}

LabelMap ReadLabelPng(const fs::path& path, const LabelSpace& space) {
  Gray16Image image = ReadPng16(path);
  LabelMap map = space.MakeLabelMap(image.width, image.height);
  for (std::size_t i = 0; i < image.pixels.size(); ++i) {
    const ClassId v = image.pixels[i];
    if (v != space.unknown() && !space.Contains(v)) {
      throw InvalidArgument(path.string() + ": pixel (" +
                            std::to_string(i % image.width) + ", " +
                            std::to_string(i / image.width) +
                            ") holds class " + std::to_string(v) +
                            " not in space '" + space.id() + "'");
    }
    map.values()[i] = v;
  }
  return map;
}

void WriteLabelPng(const fs::path& path, const LabelMap& map) {
  Gray16Image image{map.width(), map.height(),
                    {map.values().begin(), map.values().end()}};
  WritePng16(path, image);
}

DepthMap ReadDepthPng(const fs::path& path) {
  const Gray16Image image = ReadPng16(path);
  DepthMap depth(image.width, image.height);
  for (std::size_t i = 0; i < image.pixels.size(); ++i) {
    depth.values()[i] = static_cast<float>(image.pixels[i]) / 1000.0f;
  }
  return depth;
}

void WriteDepthPng(const fs::path& path, const DepthMap& depth) {
  Gray16Image image{depth.width(), depth.height(), {}};
  image.pixels.reserve(depth.values().size());
  for (float d : depth.values()) {
    const double mm = std::round(static_cast<double>(d) * 1000.0);
    if (!(d > 0) || mm < 1) {
      image.pixels.push_back(0);
    } else {
      image.pixels.push_back(
          static_cast<std::uint16_t>(std::min(mm, 65535.0)));
    }
  }
  WritePng16(path, image);
}

Pose ReadPose(const fs::path& path) {
  const std::string text = ReadTextFile(path);
  std::vector<double> values;
  for (std::string_view line : SplitLines(text)) {
    for (std::string_view tok : SplitWhitespace(line)) {
      const auto v = ParseDouble(tok);
      if (!v) {
        throw ParseError(path.string() + ": bad number '" + std::string(tok) +
                         "'");
      }
      values.push_back(*v);
    }
  }
  if (values.size() != 16) {
    throw ParseError(path.string() + ": expected 16 numbers, got " +
                     std::to_string(values.size()));
  }
  Eigen::Matrix4d m;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) m(r, c) = values[r * 4 + c];
  }
  try {
    return Pose::FromMatrix(m);
  } catch (const Error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void WritePose(const fs::path& path, const Pose& pose) {
  const Eigen::Matrix4d m = pose.Matrix();
  std::string out;
  char buf[64];
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", m(r, c));
      out += buf;
      out += c == 3 ? '\n' : ' ';
    }
  }
  WriteFileAtomic(path, out);
}

Intrinsics ReadIntrinsics(const fs::path& path) {
  const std::string text = ReadTextFile(path);
  const auto toks = SplitWhitespace(Trim(text));
  if (toks.size() != 6) {
    throw ParseError(path.string() + ": expected `fx fy cx cy width height`");
  }
  Intrinsics k;
  double* f[] = {&k.fx, &k.fy, &k.cx, &k.cy};
  for (int i = 0; i < 4; ++i) {
    const auto v = ParseDouble(toks[i]);
    if (!v) throw ParseError(path.string() + ": bad number");
    *f[i] = *v;
  }
  const auto w = ParseUnsigned(toks[4]);
  const auto h = ParseUnsigned(toks[5]);
  if (!w || !h || *w > 1 << 20 || *h > 1 << 20) {
    throw ParseError(path.string() + ": bad image size");
  }
  k.width = static_cast<int>(*w);
  k.height = static_cast<int>(*h);
  try {
    k.Validate();
  } catch (const Error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return k;
}

void WriteIntrinsics(const fs::path& path, const Intrinsics& k) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g %.17g %d %d\n", k.fx,
                k.fy, k.cx, k.cy, k.width, k.height);
  WriteFileAtomic(path, buf);
}

namespace {

enum class PlyType { kInt8, kUint8, kInt16, kUint16, kInt32, kUint32, kFloat32, kFloat64 };

std::optional<PlyType> PlyTypeOf(std::string_view name) {
  if (name == "char" || name == "int8") return PlyType::kInt8;
  if (name == "uchar" || name == "uint8") return PlyType::kUint8;
  if (name == "short" || name == "int16") return PlyType::kInt16;
  if (name == "ushort" || name == "uint16") return PlyType::kUint16;
  if (name == "int" || name == "int32") return PlyType::kInt32;
  if (name == "uint" || name == "uint32") return PlyType::kUint32;
  if (name == "float" || name == "float32") return PlyType::kFloat32;
  if (name == "double" || name == "float64") return PlyType::kFloat64;
  return std::nullopt;
}

std::size_t PlyTypeSize(PlyType t) {
  switch (t) {
    case PlyType::kInt8:
    case PlyType::kUint8:
      return 1;
    case PlyType::kInt16:
    case PlyType::kUint16:
      return 2;
    case PlyType::kInt32:
    case PlyType::kUint32:
    case PlyType::kFloat32:
      return 4;
    case PlyType::kFloat64:
      return 8;
  }
  return 0;
}

template <typename T>
T LoadLe(const char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

double ReadBinaryValue(PlyType t, const char* p) {
  switch (t) {
    case PlyType::kInt8:
      return LoadLe<std::int8_t>(p);
    case PlyType::kUint8:
      return LoadLe<std::uint8_t>(p);
    case PlyType::kInt16:
      return LoadLe<std::int16_t>(p);
    case PlyType::kUint16:
      return LoadLe<std::uint16_t>(p);
    case PlyType::kInt32:
      return LoadLe<std::int32_t>(p);
    case PlyType::kUint32:
      return LoadLe<std::uint32_t>(p);
    case PlyType::kFloat32:
      return LoadLe<float>(p);
    case PlyType::kFloat64:
      return LoadLe<double>(p);
  }
  return 0;
}

struct PlyProperty {
  std::string name;
  PlyType type = PlyType::kFloat32;
  bool is_list = false;
  PlyType count_type = PlyType::kUint8;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> properties;
};

}  // namespace

PlyCloud ParsePly(std::string_view bytes, const std::string& source) {
  std::size_t pos = 0;
  auto next_line = [&]() -> std::optional<std::string_view> {
    if (pos >= bytes.size()) return std::nullopt;
    std::size_t end = bytes.find('\n', pos);
    if (end == std::string_view::npos) end = bytes.size();
    std::string_view line = bytes.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
  };
  auto first = next_line();
  if (!first || Trim(*first) != "ply") throw ParseError(source + ": not a PLY file");
  bool binary = false;
  std::vector<PlyElement> elements;
  bool header_done = false;
  while (auto line = next_line()) {
    const auto toks = SplitWhitespace(*line);
    if (toks.empty()) continue;
    if (toks[0] == "end_header") {
      header_done = true;
      break;
    }
    if (toks[0] == "comment" || toks[0] == "obj_info") continue;
    if (toks[0] == "format") {
      if (toks.size() < 2) throw ParseError(source + ": bad format line");
      if (toks[1] == "ascii") {
        binary = false;
      } else if (toks[1] == "binary_little_endian") {
        binary = true;
      } else {
        throw ParseError(source + ": unsupported PLY format '" +
                         std::string(toks[1]) + "'");
      }
    } else if (toks[0] == "element") {
      if (toks.size() != 3) throw ParseError(source + ": bad element line");
      const auto count = ParseUnsigned(toks[2]);
      if (!count) throw ParseError(source + ": bad element count");
      elements.push_back({std::string(toks[1]), *count, {}});
    } else if (toks[0] == "property") {
      if (elements.empty()) throw ParseError(source + ": property before element");
      PlyProperty prop;
      if (toks.size() == 5 && toks[1] == "list") {
        const auto ct = PlyTypeOf(toks[2]);
        const auto vt = PlyTypeOf(toks[3]);
        if (!ct || !vt) throw ParseError(source + ": bad list property");
        prop.is_list = true;
        prop.count_type = *ct;
        prop.type = *vt;
        prop.name = std::string(toks[4]);
      } else if (toks.size() == 3) {
        const auto t = PlyTypeOf(toks[1]);
        if (!t) {
          throw ParseError(source + ": unknown property type '" +
                           std::string(toks[1]) + "'");
        }
        prop.type = *t;
        prop.name = std::string(toks[2]);
      } else {
        throw ParseError(source + ": bad property line");
      }
      elements.back().properties.push_back(std::move(prop));
    } else {
      throw ParseError(source + ": unexpected header line '" +
                       std::string(*line) + "'");
    }
  }
  if (!header_done) throw ParseError(source + ": missing end_header");

  PlyCloud cloud;
  std::size_t ascii_line = 0;
  std::vector<std::string_view> ascii_tokens;
  std::size_t ascii_cursor = 0;
  auto ascii_next = [&]() -> double {
    while (ascii_cursor >= ascii_tokens.size()) {
      auto line = next_line();
      if (!line) throw ParseError(source + ": truncated ASCII body");
      ++ascii_line;
      ascii_tokens = SplitWhitespace(*line);
      ascii_cursor = 0;
    }
    const auto v = ParseDouble(ascii_tokens[ascii_cursor++]);
    if (!v) throw ParseError(source + ": bad number in body");
    return *v;
  };
  auto binary_next = [&](PlyType t) -> double {
    const std::size_t n = PlyTypeSize(t);
    if (pos + n > bytes.size()) throw ParseError(source + ": truncated binary body");
    const double v = ReadBinaryValue(t, bytes.data() + pos);
    pos += n;
    return v;
  };
  auto read_value = [&](PlyType t) {
    return binary ? binary_next(t) : ascii_next();
  };

  bool seen_vertex = false;
  for (const PlyElement& element : elements) {
    const bool is_vertex = element.name == "vertex";
    int ix = -1, iy = -1, iz = -1, il = -1;
    for (std::size_t p = 0; p < element.properties.size(); ++p) {
      const auto& name = element.properties[p].name;
      if (element.properties[p].is_list) continue;
      if (name == "x") ix = static_cast<int>(p);
      if (name == "y") iy = static_cast<int>(p);
      if (name == "z") iz = static_cast<int>(p);
      if (name == "label") il = static_cast<int>(p);
    }
    if (is_vertex) {
      if (ix < 0 || iy < 0 || iz < 0) {
        throw ParseError(source + ": vertex element lacks x/y/z");
      }
      seen_vertex = true;
      cloud.points.reserve(element.count);
      if (il >= 0) cloud.labels.reserve(element.count);
    }
    std::vector<double> row(element.properties.size());
    for (std::size_t i = 0; i < element.count; ++i) {
      if (!binary) {
        // Each ASCII element occupies exactly one line.
        ascii_cursor = ascii_tokens.size();
      }
      for (std::size_t p = 0; p < element.properties.size(); ++p) {
        const PlyProperty& prop = element.properties[p];
        if (prop.is_list) {
          const double n = read_value(prop.count_type);
          if (n < 0) throw ParseError(source + ": negative list length");
          for (std::size_t k = 0; k < static_cast<std::size_t>(n); ++k) {
            read_value(prop.type);
          }
          continue;
        }
        row[p] = read_value(prop.type);
      }
      if (is_vertex) {
        cloud.points.emplace_back(row[ix], row[iy], row[iz]);
        if (il >= 0) {
          const double label = row[il];
          if (label < 0 || label > 65535 || label != std::floor(label)) {
            throw ParseError(source + ": vertex " + std::to_string(i) +
                             " has an invalid label");
          }
          cloud.labels.push_back(static_cast<ClassId>(label));
        }
      }
    }
    if (is_vertex) break;
  }
  if (!seen_vertex) throw ParseError(source + ": no vertex element");
  (void)ascii_line;
  return cloud;
}

PlyCloud ReadPly(const fs::path& path) {
  const auto bytes = ReadBinaryFile(path);
  return ParsePly(
      std::string_view(reinterpret_cast<const char*>(bytes.data()),
                       bytes.size()),
      path.string());
}

namespace {

template <typename T>
void AppendLe(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

std::string PlyHeader(std::size_t count, bool color) {
  std::string h = "ply\nformat binary_little_endian 1.0\nelement vertex " +
                  std::to_string(count) +
                  "\nproperty float x\nproperty float y\nproperty float z\n"
                  "property ushort label\n";
  if (color) {
    h += "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  }
  return h + "end_header\n";
}

void CheckCloud(const LabeledPointCloud& cloud) {
  if (cloud.labels.size() != cloud.points.size()) {
    throw InvalidArgument("labeled cloud has mismatched label count");
  }
}

}  // namespace

void WriteLabeledPly(const fs::path& path, const LabeledPointCloud& cloud) {
  CheckCloud(cloud);
  std::string out = PlyHeader(cloud.points.size(), false);
  out.reserve(out.size() + cloud.points.size() * 14);
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    for (int a = 0; a < 3; ++a) {
      AppendLe(out, static_cast<float>(cloud.points[i][a]));
    }
    AppendLe(out, cloud.labels[i]);
  }
  WriteFileAtomic(path, out);
}

Palette ReadPalette(const fs::path& path) {
  Palette palette;
  const std::string text = ReadTextFile(path);
  std::size_t line_no = 0;
  for (std::string_view line : SplitLines(text)) {
    ++line_no;
    line = Trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto cols = Split(line, ',');
    const auto id = cols.size() == 4 ? ParseUnsigned(Trim(cols[0])) : std::nullopt;
    if (!id) {
      if (line_no == 1 || palette.empty()) continue;  // header
      throw ParseError(path.string() + ":" + std::to_string(line_no) +
                       ": expected class_id,r,g,b");
    }
    Rgb rgb{};
    for (int c = 0; c < 3; ++c) {
      const auto v = ParseUnsigned(Trim(cols[c + 1]));
      if (!v || *v > 255) {
        throw ParseError(path.string() + ":" + std::to_string(line_no) +
                         ": colour components must be 0-255");
      }
      rgb[c] = static_cast<std::uint8_t>(*v);
    }
    palette[static_cast<ClassId>(*id)] = rgb;
  }
  return palette;
}

Rgb DefaultColor(ClassId class_id) {
  std::uint32_t h = class_id * 2654435761u;
  h ^= h >> 15;
  return {static_cast<std::uint8_t>(64 + (h & 0xBF)),
          static_cast<std::uint8_t>(64 + ((h >> 8) & 0xBF)),
          static_cast<std::uint8_t>(64 + ((h >> 16) & 0xBF))};
}

void WriteColoredPly(const fs::path& path, const LabeledPointCloud& cloud,
                     const Palette& palette) {
  CheckCloud(cloud);
  std::string out = PlyHeader(cloud.points.size(), true);
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    for (int a = 0; a < 3; ++a) {
      AppendLe(out, static_cast<float>(cloud.points[i][a]));
    }
    const ClassId label = cloud.labels[i];
    AppendLe(out, label);
    Rgb rgb{0, 0, 0};
    if (label != cloud.unknown) {
      const auto it = palette.find(label);
      rgb = it != palette.end() ? it->second : DefaultColor(label);
    }
    out.append(reinterpret_cast<const char*>(rgb.data()), 3);
  }
  WriteFileAtomic(path, out);
}

void WriteFileAtomic(const fs::path& path, std::string_view bytes) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string());
  }
  fs::path tmp = path;
  tmp += ".tmp-" + std::to_string(std::random_device{}());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot create " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("failed writing " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot rename into " + path.string());
  }
}

StagedDirectory::StagedDirectory(fs::path target) : target_(std::move(target)) {
  staging_ = target_;
  staging_ += ".staging-" + std::to_string(std::random_device{}());
  std::error_code ec;
  fs::create_directories(staging_, ec);
  if (ec) throw IoError("cannot create " + staging_.string());
}

StagedDirectory::~StagedDirectory() {
  if (!committed_) {
    std::error_code ec;
    fs::remove_all(staging_, ec);
  }
}

void StagedDirectory::Commit() {
  std::error_code ec;
  fs::path backup;
  if (fs::exists(target_)) {
    backup = target_;
    backup += ".old-" + std::to_string(std::random_device{}());
    fs::rename(target_, backup, ec);
    if (ec) throw IoError("cannot move aside " + target_.string());
  }
  fs::rename(staging_, target_, ec);
  if (ec) {
    if (!backup.empty()) fs::rename(backup, target_, ec);
    throw IoError("cannot move " + staging_.string() + " into place");
  }
  committed_ = true;
  if (!backup.empty()) fs::remove_all(backup, ec);
}

fs::path FramePath(const fs::path& dir, int frame, std::string_view ext) {
  char name[32];
  std::snprintf(name, sizeof(name), "%06d", frame);
  return dir / (std::string(name) + std::string(ext));
}

std::vector<int> ListFrames(const fs::path& dir, std::string_view ext) {
  std::vector<int> frames;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    throw IoError("missing directory " + dir.string());
  }
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.size() <= ext.size() ||
        name.compare(name.size() - ext.size(), ext.size(), ext) != 0) {
      continue;
    }
    const auto index = ParseUnsigned(
        std::string_view(name).substr(0, name.size() - ext.size()));
    if (index && *index <= INT32_MAX) frames.push_back(static_cast<int>(*index));
  }
  std::sort(frames.begin(), frames.end());
  return frames;
}

}  // namespace labelfuse
