#include "nsmp/complex_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "nsmp/kg_store.hpp"

namespace nsmp {

ComplexEmbeddingTable::ComplexEmbeddingTable(std::size_t num_entities, std::size_t num_relations,
                                             std::size_t rank)
    : num_entities_(num_entities),
      num_relations_(num_relations),
      rank_(rank),
      entity_real_(num_entities * rank, 0.0f),
      entity_imag_(num_entities * rank, 0.0f),
      relation_real_(num_relations * rank, 0.0f),
      relation_imag_(num_relations * rank, 0.0f) {
    if (rank == 0) throw DimensionError("embedding rank must be positive");
}

namespace {

ComplexVec gather(const std::vector<float>& re, const std::vector<float>& im, std::size_t i,
                  std::size_t rank) {
    ComplexVec out(rank);
    for (std::size_t k = 0; k < rank; ++k) out[k] = {re[i * rank + k], im[i * rank + k]};
    return out;
}

void scatter(std::vector<float>& re, std::vector<float>& im, std::size_t i, std::size_t rank,
             std::span<const std::complex<double>> value) {
    if (value.size() != rank) throw DimensionError("embedding has wrong rank");
    for (std::size_t k = 0; k < rank; ++k) {
        re[i * rank + k] = static_cast<float>(value[k].real());
        im[i * rank + k] = static_cast<float>(value[k].imag());
    }
}

}  // namespace

ComplexVec ComplexEmbeddingTable::entity(EntityId e) const {
    if (e >= num_entities_) throw DimensionError("entity id out of range");
    return gather(entity_real_, entity_imag_, e, rank_);
}

ComplexVec ComplexEmbeddingTable::relation(RelationId r) const {
    if (r >= num_relations_) throw DimensionError("relation id out of range");
    return gather(relation_real_, relation_imag_, r, rank_);
}

void ComplexEmbeddingTable::set_entity(EntityId e, std::span<const std::complex<double>> value) {
    if (e >= num_entities_) throw DimensionError("entity id out of range");
    scatter(entity_real_, entity_imag_, e, rank_, value);
}

void ComplexEmbeddingTable::set_relation(RelationId r,
                                         std::span<const std::complex<double>> value) {
    if (r >= num_relations_) throw DimensionError("relation id out of range");
    scatter(relation_real_, relation_imag_, r, rank_, value);
}

void ComplexEmbeddingTable::scale_entities(double factor) {
    for (auto& x : entity_real_) x = static_cast<float>(x * factor);
    for (auto& x : entity_imag_) x = static_cast<float>(x * factor);
}

double score(std::span<const std::complex<double>> h, std::span<const std::complex<double>> r,
             std::span<const std::complex<double>> t) {
    if (h.size() != r.size() || h.size() != t.size())
        throw DimensionError("score arguments have different ranks");
    double s = 0.0;
    for (std::size_t k = 0; k < h.size(); ++k) s += (h[k] * r[k] * std::conj(t[k])).real();
    return s;
}

double score(const ComplexEmbeddingTable& table, EntityId h, RelationId r, EntityId t) {
    return score(table.entity(h), table.relation(r), table.entity(t));
}

ComplexVec rho(const ComplexEmbeddingTable& table, std::span<const std::complex<double>> state,
               RelationId r, Direction direction, Polarity polarity) {
    if (state.size() != table.rank()) throw DimensionError("state has wrong rank");
    const ComplexVec rel = table.relation(r);
    const double sign = polarity == Polarity::Positive ? 1.0 : -1.0;
    ComplexVec out(state.size());
    for (std::size_t k = 0; k < state.size(); ++k) {
        const auto factor = direction == Direction::HeadToTail ? rel[k] : std::conj(rel[k]);
        out[k] = sign * factor * state[k];
    }
    return out;
}

std::vector<double> similarities(const ComplexEmbeddingTable& table,
                                 std::span<const std::complex<double>> message) {
    const std::size_t rank = table.rank();
    if (message.size() != rank) throw DimensionError("message has wrong rank");
    std::vector<double> out(table.num_entities());
    const float* re = table.entity_real().data();
    const float* im = table.entity_imag().data();
    for (std::size_t e = 0; e < out.size(); ++e) {
        // Re(E * conj(m)) = E_re m_re + E_im m_im
        double s = 0.0;
        for (std::size_t k = 0; k < rank; ++k)
            s += re[e * rank + k] * message[k].real() + im[e * rank + k] * message[k].imag();
        out[e] = s;
    }
    return out;
}

std::vector<double> softmax(std::span<const double> logits) {
    std::vector<double> out(logits.begin(), logits.end());
    if (out.empty()) return out;
    const double top = *std::max_element(out.begin(), out.end());
    double total = 0.0;
    for (auto& x : out) {
        x = std::exp(x - top);
        total += x;
    }
    for (auto& x : out) x /= total;
    return out;
}

std::vector<double> embedding_to_fuzzy(const ComplexEmbeddingTable& table,
                                       std::span<const std::complex<double>> message) {
    return softmax(similarities(table, message));
}

std::vector<double> cosine_similarities(const ComplexEmbeddingTable& table,
                                        std::span<const std::complex<double>> v) {
    const std::size_t rank = table.rank();
    if (v.size() != rank) throw DimensionError("vector has wrong rank");
    std::vector<double> out(table.num_entities(), 0.0);
    double vnorm = 0.0;
    for (const auto& z : v) vnorm += std::norm(z);
    if (vnorm == 0.0) return out;
    vnorm = std::sqrt(vnorm);

    const float* re = table.entity_real().data();
    const float* im = table.entity_imag().data();
    for (std::size_t e = 0; e < out.size(); ++e) {
        double dot = 0.0, enorm = 0.0;
        for (std::size_t k = 0; k < rank; ++k) {
            const double a = re[e * rank + k], b = im[e * rank + k];
            dot += a * v[k].real() + b * v[k].imag();
            enorm += a * a + b * b;
        }
        out[e] = enorm == 0.0 ? 0.0 : dot / (vnorm * std::sqrt(enorm));
    }
    return out;
}

namespace {

constexpr char kMagic[8] = {'N', 'S', 'M', 'P', 'E', 'M', 'B', '1'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "embedding I/O assumes a little-endian host");

template <typename T>
void write_pod(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T read_pod(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw FormatError("embedding file truncated in header");
    return v;
}

void write_array(std::ostream& out, const std::vector<float>& a) {
    out.write(reinterpret_cast<const char*>(a.data()),
              static_cast<std::streamsize>(a.size() * sizeof(float)));
}

void read_array(std::istream& in, std::vector<float>& a) {
    in.read(reinterpret_cast<char*>(a.data()),
            static_cast<std::streamsize>(a.size() * sizeof(float)));
    if (!in) throw FormatError("embedding file truncated in data section");
}

}  // namespace

void save_embeddings(const ComplexEmbeddingTable& table, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out.write(kMagic, sizeof kMagic);
    write_pod(out, kVersion);
    write_pod(out, static_cast<std::uint64_t>(table.num_entities()));
    write_pod(out, static_cast<std::uint64_t>(table.num_relations()));
    write_pod(out, static_cast<std::uint64_t>(table.rank()));
    write_array(out, table.entity_real());
    write_array(out, table.entity_imag());
    write_array(out, table.relation_real());
    write_array(out, table.relation_imag());
    if (!out) throw Error("failed writing " + path.string());
}

ComplexEmbeddingTable load_embeddings(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open embedding file " + path.string());

    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0)
        throw FormatError("bad magic in " + path.string());
    if (auto v = read_pod<std::uint32_t>(in); v != kVersion)
        throw FormatError("unsupported embedding file version " + std::to_string(v));
    const auto nv = read_pod<std::uint64_t>(in);
    const auto nr = read_pod<std::uint64_t>(in);
    const auto rank = read_pod<std::uint64_t>(in);
    if (rank == 0 || nv == 0) throw FormatError("embedding file declares an empty shape");

    // Check the payload size before allocating anything the header claims.
    const auto header_end = in.tellg();
    in.seekg(0, std::ios::end);
    const auto file_end = in.tellg();
    in.seekg(header_end);
    const std::uint64_t expected = 2 * (nv + nr) * rank * sizeof(float);
    if (static_cast<std::uint64_t>(file_end - header_end) != expected)
        throw FormatError("embedding file size does not match header shape");

    ComplexEmbeddingTable table(nv, nr, rank);
    read_array(in, table.entity_real());
    read_array(in, table.entity_imag());
    read_array(in, table.relation_real());
    read_array(in, table.relation_imag());
    for (const auto* a : {&table.entity_real(), &table.entity_imag(), &table.relation_real(),
                          &table.relation_imag()})
        for (float x : *a)
            if (!std::isfinite(x)) throw FormatError("embedding file contains non-finite values");
    return table;
}

void check_compatible(const ComplexEmbeddingTable& table, const TripleStore& store) {
    if (table.num_entities() != store.num_entities() ||
        table.num_relations() != store.num_relations())
        throw DimensionError("embedding table shape (" + std::to_string(table.num_entities()) +
                             " entities, " + std::to_string(table.num_relations()) +
                             " relations) does not match the knowledge graph (" +
                             std::to_string(store.num_entities()) + ", " +
                             std::to_string(store.num_relations()) + ")");
}

}  // namespace nsmp
