#include "align/emb_io.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace align {

namespace {

constexpr char kMagic[4] = {'E', 'M', 'B', '1'};

void put_u64_le(std::uint64_t v, unsigned char out[8]) {
    for (int i = 0; i < 8; ++i) {
        out[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xffu);
    }
}

std::uint64_t get_u64_le(const unsigned char in[8]) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
        v |= static_cast<std::uint64_t>(in[i]) << (8 * i);
    }
    return v;
}

void put_f32_le(float v, unsigned char out[4]) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    for (int i = 0; i < 4; ++i) {
        out[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xffu);
    }
}

float get_f32_le(const unsigned char in[4]) {
    std::uint32_t bits = 0;
    for (int i = 0; i < 4; ++i) {
        bits |= static_cast<std::uint32_t>(in[i]) << (8 * i);
    }
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
}

}  // namespace

std::size_t write_embeddings(const EmbeddingMatrix& matrix, std::ostream& destination) {
    const std::size_t n = matrix.n_samples();
    const std::size_t d = matrix.n_dims();

    std::vector<unsigned char> payload(4 * n * d);
    for (std::size_t i = 0; i < n * d; ++i) {
        const float f = static_cast<float>(matrix.values()[i]);
        if (!std::isfinite(f)) {
            throw ValidationError("value is not representable as a finite binary32");
        }
        put_f32_le(f, payload.data() + 4 * i);
    }

    unsigned char header[20];
    std::memcpy(header, kMagic, 4);
    put_u64_le(n, header + 4);
    put_u64_le(d, header + 12);

    destination.write(reinterpret_cast<const char*>(header), 20);
    destination.write(reinterpret_cast<const char*>(payload.data()),
                      static_cast<std::streamsize>(payload.size()));
    if (!destination) {
        throw IoError("failed writing EMB1 stream");
    }
    return 20 + payload.size();
}

std::size_t write_embeddings_file(const EmbeddingMatrix& matrix,
                                  const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open for writing: " + path.string());
    }
    return write_embeddings(matrix, out);
}

EmbeddingMatrix read_embeddings(std::istream& source, Modality modality,
                                std::optional<int> layer) {
    unsigned char header[20];
    source.read(reinterpret_cast<char*>(header), 20);
    if (source.gcount() != 20) {
        throw FormatError("truncated header");
    }
    if (std::memcmp(header, kMagic, 4) != 0) {
        throw FormatError("bad magic");
    }
    const std::uint64_t n = get_u64_le(header + 4);
    const std::uint64_t d = get_u64_le(header + 12);
    if (n < 1 || d < 1) {
        throw FormatError("header declares an empty matrix");
    }
    if (n >= (1ull << 32) || d >= (1ull << 32) || n * d > (1ull << 34)) {
        throw FormatError("header dimensions implausibly large");
    }

    std::vector<unsigned char> payload(4 * n * d);
    source.read(reinterpret_cast<char*>(payload.data()),
                static_cast<std::streamsize>(payload.size()));
    if (static_cast<std::size_t>(source.gcount()) != payload.size()) {
        throw FormatError("truncated payload");
    }

    std::vector<double> values(n * d);
    for (std::size_t i = 0; i < n * d; ++i) {
        const float f = get_f32_le(payload.data() + 4 * i);
        if (!std::isfinite(f)) {
            throw ValidationError("payload contains a non-finite value");
        }
        values[i] = static_cast<double>(f);
    }
    return EmbeddingMatrix(n, d, std::move(values), modality, layer);
}

EmbeddingMatrix read_embeddings_file(const std::filesystem::path& path, Modality modality,
                                     std::optional<int> layer) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open for reading: " + path.string());
    }
    return read_embeddings(in, modality, layer);
}

EmbHeader read_embeddings_header(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open for reading: " + path.string());
    }
    unsigned char header[20];
    in.read(reinterpret_cast<char*>(header), 20);
    if (in.gcount() != 20) {
        throw FormatError("truncated header: " + path.string());
    }
    if (std::memcmp(header, kMagic, 4) != 0) {
        throw FormatError("bad magic: " + path.string());
    }
    return EmbHeader{static_cast<std::size_t>(get_u64_le(header + 4)),
                     static_cast<std::size_t>(get_u64_le(header + 12))};
}

CsvEmbeddings read_embeddings_csv(const std::filesystem::path& path, Modality modality,
                                  std::optional<int> layer) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open for reading: " + path.string());
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw FormatError("empty CSV file: " + path.string());
    }
    if (line.rfind("id,", 0) != 0) {
        throw FormatError("CSV header must start with 'id,'");
    }
    std::size_t n_dims = 0;
    for (char c : line) {
        if (c == ',') ++n_dims;
    }

    std::vector<std::string> ids;
    std::vector<double> values;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        if (!std::getline(row, cell, ',')) {
            throw FormatError("CSV row missing id");
        }
        ids.push_back(cell);
        std::size_t got = 0;
        while (std::getline(row, cell, ',')) {
            try {
                values.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw FormatError("CSV cell is not a number: " + cell);
            }
            ++got;
        }
        if (got != n_dims) {
            throw FormatError("CSV row has wrong number of columns: " + ids.back());
        }
    }
    if (ids.empty()) {
        throw FormatError("CSV file has no data rows: " + path.string());
    }
    EmbeddingMatrix matrix(ids.size(), n_dims, std::move(values), modality, layer);
    return CsvEmbeddings{std::move(ids), std::move(matrix)};
}

const ManifestEntry* DatasetManifest::find(Modality modality, std::optional<int> layer) const {
    for (const ManifestEntry& e : entries) {
        if (e.modality == modality && e.layer == layer) return &e;
    }
    return nullptr;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open manifest: " + path.string());
    }
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ManifestError("manifest is not valid JSON: " + std::string(e.what()));
    }
    if (!doc.is_object() || !doc.contains("sample_ids") || !doc.contains("entries")) {
        throw ManifestError("manifest must contain 'sample_ids' and 'entries'");
    }

    DatasetManifest manifest;
    for (const auto& id : doc.at("sample_ids")) {
        if (!id.is_string()) {
            throw ManifestError("sample_ids must be strings");
        }
        manifest.sample_ids.push_back(id.get<std::string>());
    }
    if (manifest.sample_ids.empty()) {
        throw ManifestError("manifest declares no sample_ids");
    }

    const std::filesystem::path base = path.has_parent_path()
                                           ? path.parent_path()
                                           : std::filesystem::path(".");
    for (const auto& entry : doc.at("entries")) {
        ManifestEntry e;
        if (!entry.is_object() || !entry.contains("path") || !entry.contains("modality")) {
            throw ManifestError("entry must contain 'path' and 'modality'");
        }
        std::filesystem::path rel = entry.at("path").get<std::string>();
        e.path = rel.is_absolute() ? rel : base / rel;
        e.modality = modality_from_name(entry.at("modality").get<std::string>());
        if (entry.contains("layer") && !entry.at("layer").is_null()) {
            e.layer = entry.at("layer").get<int>();
        }

        for (const ManifestEntry& seen : manifest.entries) {
            if (seen.modality == e.modality && seen.layer == e.layer) {
                std::string layer_str = e.layer ? std::to_string(*e.layer) : "none";
                throw ManifestError("duplicate manifest entry (" +
                                    std::string(modality_name(e.modality)) + ", layer " +
                                    layer_str + ")");
            }
        }

        if (!std::filesystem::exists(e.path)) {
            throw ManifestError("manifest references a missing file: " + e.path.string());
        }
        const EmbHeader header = read_embeddings_header(e.path);
        if (header.n_samples != manifest.sample_ids.size()) {
            throw ManifestError("entry " + e.path.string() + " has " +
                                std::to_string(header.n_samples) + " rows, expected " +
                                std::to_string(manifest.sample_ids.size()));
        }
        manifest.entries.push_back(std::move(e));
    }
    return manifest;
}

EmbeddingMatrix load_entry(const DatasetManifest& manifest, const ManifestEntry& entry) {
    EmbeddingMatrix m = read_embeddings_file(entry.path, entry.modality, entry.layer);
    if (m.n_samples() != manifest.sample_ids.size()) {
        throw ManifestError("row count changed on disk: " + entry.path.string());
    }
    return m;
}

}  // namespace align
