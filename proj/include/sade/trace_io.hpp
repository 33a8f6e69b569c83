#pragma once

#include "sade/engine.hpp"

#include <bit>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>

namespace sade {

// FNV-1a folded over 64-bit words. Used for trace and schedule hashes and
// for manifest artifact digests; not cryptographic.
class WordHash {
public:
    void add(std::uint64_t w) noexcept {
        h_ ^= w;
        h_ *= 0x100000001B3ULL;
    }
    void add_double(double d) noexcept { add(std::bit_cast<std::uint64_t>(d)); }
    std::uint64_t value() const noexcept { return h_; }

private:
    std::uint64_t h_ = 0xCBF29CE484222325ULL;
};

inline std::uint64_t obs_word(const Observation& o) noexcept {
    return static_cast<std::uint64_t>(o.kind) |
           (static_cast<std::uint64_t>(o.sender) << 8);
}

// Canonical per-round digest words; the streaming hasher in the engine and
// trace_hash() below must agree on this exact sequence.
inline void hash_round(WordHash& h, std::uint64_t round, std::span<const Action> actions,
                       std::span<const Observation> obs, std::span<const double> noise) noexcept {
    h.add(round);
    for (std::size_t v = 0; v < actions.size(); ++v) {
        h.add(static_cast<std::uint64_t>(actions[v]) | (obs_word(obs[v]) << 1));
        h.add_double(noise[v]);
    }
}

inline void hash_header(WordHash& h, std::uint32_t n, std::uint64_t rounds,
                        std::uint64_t seed) noexcept {
    h.add(0x53414445u); // tag
    h.add(n);
    h.add(rounds);
    h.add(seed);
}

// Recomputes the hash the engine streamed while producing this trace.
std::uint64_t trace_hash(const Trace& trace);

std::uint64_t fnv1a_bytes(std::span<const char> bytes);
std::uint64_t hash_file(const std::string& path);

// CSV: header then one line per (round, node):
//   round,node,action,observation,noise
// action is transmit|listen; observation is sent|busy|idle|received:<id>.
void save_trace_csv(const Trace& trace, std::ostream& out);

// Compact binary framing: magic "SADT", version 0x01, then little-endian
// config, topology and per-round records. Load restores a trace bit-exactly.
void save_trace_binary(const Trace& trace, std::ostream& out);
Trace load_trace_binary(std::istream& in);
void save_trace_binary_file(const Trace& trace, const std::string& path);
Trace load_trace_binary_file(const std::string& path);

// Jam-schedule audit export: round,node,noise.
void export_jam_schedule_csv(const Trace& trace, std::ostream& out);

} // namespace sade
