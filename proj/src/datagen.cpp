#include "brix/datagen.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>

#include "brix/csv.hpp"

namespace brix::datagen {

namespace {

constexpr char kAlnum62[] =
    "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
constexpr char kAlnum36[] = "abcdefghijklmnopqrstuvwxyz0123456789";

constexpr std::uint64_t kRowSalt = 0xA24BAED4963EE407ull;
constexpr std::uint64_t kColSalt = 0x9FB21C651E98DF25ull;
constexpr std::uint64_t kEmailSalt = 0x632BE59BD9B4E019ull;
constexpr std::uint64_t kPhoneSalt = 0xE220A8397B1DCDAFull;

std::string pad9(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%09llu", static_cast<unsigned long long>(v));
  return buf;
}

// Filler token, 8..16 alphanumeric chars drawn from the cell's own stream.
void append_token(std::string& out, std::uint64_t state) {
  const std::size_t len = 8 + static_cast<std::size_t>(splitmix64(state) % 9);
  std::uint64_t bits = 0;
  int left = 0;
  for (std::size_t i = 0; i < len; ++i) {
    if (left == 0) {
      bits = splitmix64(state);
      left = 10;  // 62^10 still fits a u64
    }
    out.push_back(kAlnum62[bits % 62]);
    bits /= 62;
    --left;
  }
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::string generated_email(std::uint64_t seed, std::uint64_t row) {
  std::uint64_t state = seed ^ (row * kRowSalt) ^ kEmailSalt;
  std::string email;
  email.reserve(32);
  email.push_back('u');
  email.append(std::to_string(row));
  email.push_back('x');
  std::uint64_t bits = splitmix64(state);
  for (int i = 0; i < 6; ++i) {
    email.push_back(kAlnum36[bits % 36]);
    bits /= 36;
  }
  email.append("@synth.example");
  return email;
}

std::string generated_phone(std::uint64_t seed, std::uint64_t row) {
  std::uint64_t state = seed ^ (row * kRowSalt) ^ kPhoneSalt;
  const std::uint64_t v = 1000000000ull + splitmix64(state) % 9000000000ull;
  return std::to_string(v);
}

std::string absent_email(unsigned salt) {
  return "absent" + pad9(salt) + "@absent.invalid";
}

std::string absent_phone_digits(unsigned salt) { return "888" + pad9(salt); }

std::vector<Plant> quartile_plants(std::uint64_t rows) {
  std::vector<Plant> plants;
  for (std::uint64_t q : quartile_rows(rows)) {
    plants.push_back(
        {q, "plant" + pad9(q) + "@planted.example", "999" + pad9(q)});
  }
  return plants;
}

std::vector<std::uint64_t> quartile_rows(std::uint64_t row_count) {
  if (row_count < 4) {
    throw std::invalid_argument("quartile_rows requires row_count >= 4");
  }
  return {
      (row_count + 3) / 4,
      (row_count + 1) / 2,
      (3 * row_count + 3) / 4,
      row_count,
  };
}

void validate(const GenSpec& spec) {
  if (spec.columns < 1) throw SpecError("columns must be >= 1");
  if (spec.email_column == spec.phone_column) {
    throw SpecError("email_column must differ from phone_column");
  }
  if (spec.email_column >= spec.columns) throw SpecError("email_column out of range");
  if (spec.phone_column >= spec.columns) throw SpecError("phone_column out of range");
  std::uint64_t prev = 0;
  for (const Plant& p : spec.planted) {
    if (p.row_number < 1 || p.row_number > spec.rows) {
      throw SpecError("planted row " + std::to_string(p.row_number) +
                      " outside [1, " + std::to_string(spec.rows) + "]");
    }
    if (p.row_number <= prev) {
      throw SpecError("planted rows must be strictly increasing");
    }
    prev = p.row_number;
  }
}

DatasetDescriptor generate_dataset(const GenSpec& spec,
                                   const std::filesystem::path& out_path) {
  validate(spec);
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + out_path.string());

  std::string buf;
  buf.reserve(4 << 20);

  for (std::uint32_t c = 0; c < spec.columns; ++c) {
    if (c) buf.push_back(',');
    buf.append("col");
    buf.append(std::to_string(c));
  }
  buf.push_back('\n');

  std::size_t plant_i = 0;
  for (std::uint64_t row = 1; row <= spec.rows; ++row) {
    const Plant* plant = nullptr;
    if (plant_i < spec.planted.size() && spec.planted[plant_i].row_number == row) {
      plant = &spec.planted[plant_i];
      ++plant_i;
    }
    for (std::uint32_t c = 0; c < spec.columns; ++c) {
      if (c) buf.push_back(',');
      if (c == spec.email_column) {
        buf.append(plant ? plant->email : generated_email(spec.seed, row));
      } else if (c == spec.phone_column) {
        buf.append(plant ? plant->phone : generated_phone(spec.seed, row));
      } else {
        append_token(buf, spec.seed ^ (row * kRowSalt) ^ ((c + 1ull) * kColSalt));
      }
    }
    buf.push_back('\n');
    if (buf.size() >= (4 << 20) - (1 << 16)) {
      out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
      if (!out) throw IoError("write failed on " + out_path.string());
      buf.clear();
    }
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  out.close();
  if (!out) throw IoError("close failed on " + out_path.string());

  DatasetDescriptor d;
  d.path = out_path;
  d.row_count = spec.rows;
  d.column_count = spec.columns;
  d.has_header = true;
  d.fingerprint = fingerprint_dataset(out_path);
  d.size_bytes = d.fingerprint.size_bytes;
  return d;
}

// ---------------------------------------------------------------------------
// Plant manifest

std::filesystem::path default_manifest_path(const std::filesystem::path& corpus) {
  return std::filesystem::path(corpus.string() + ".plants.json");
}

void write_manifest(const GenSpec& spec, const std::filesystem::path& corpus,
                    const std::filesystem::path& manifest_path) {
  nlohmann::ordered_json j;
  j["corpus"] = corpus.string();
  j["rows"] = spec.rows;
  j["columns"] = spec.columns;
  j["seed"] = spec.seed;
  j["email_column"] = spec.email_column;
  j["phone_column"] = spec.phone_column;
  auto plants = nlohmann::ordered_json::array();
  for (const Plant& p : spec.planted) {
    plants.push_back({{"row", p.row_number}, {"email", p.email}, {"phone", p.phone}});
  }
  j["plants"] = std::move(plants);
  std::ofstream out(manifest_path, std::ios::trunc);
  if (!out) throw IoError("cannot create " + manifest_path.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed on " + manifest_path.string());
}

GenSpec read_manifest(const std::filesystem::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw IoError("cannot open " + manifest_path.string());
  GenSpec spec;
  try {
    const auto j = nlohmann::json::parse(in);
    spec.rows = j.at("rows").get<std::uint64_t>();
    spec.columns = j.at("columns").get<std::uint32_t>();
    spec.seed = j.at("seed").get<std::uint64_t>();
    spec.email_column = j.at("email_column").get<std::uint32_t>();
    spec.phone_column = j.at("phone_column").get<std::uint32_t>();
    for (const auto& p : j.at("plants")) {
      spec.planted.push_back({p.at("row").get<std::uint64_t>(),
                              p.at("email").get<std::string>(),
                              p.at("phone").get<std::string>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw SpecError("manifest " + manifest_path.string() + ": " + e.what());
  }
  return spec;
}

}  // namespace brix::datagen
