#include "sade/trace_io.hpp"

#include <cstring>
#include <fstream>
#include <ostream>
#include <vector>

namespace sade {

std::uint64_t trace_hash(const Trace& trace) {
    WordHash h;
    hash_header(h, trace.n, trace.rounds, trace.config.seed);
    for (std::uint64_t t = 0; t < trace.rounds; ++t) {
        const std::size_t base = trace.at(t, 0);
        hash_round(h, t, std::span(trace.actions).subspan(base, trace.n),
                   std::span(trace.obs).subspan(base, trace.n),
                   std::span(trace.noise).subspan(base, trace.n));
    }
    return h.value();
}

std::uint64_t fnv1a_bytes(std::span<const char> bytes) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::uint64_t hash_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open for hashing: " + path);
    std::uint64_t h = 0xCBF29CE484222325ULL;
    char buf[1 << 16];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001B3ULL;
        }
    }
    return h;
}

namespace {

const char* action_name(Action a) {
    return a == Action::transmit ? "transmit" : "listen";
}

void print_obs(std::ostream& out, const Observation& o) {
    switch (o.kind) {
    case ObsKind::sent: out << "sent"; break;
    case ObsKind::busy: out << "busy"; break;
    case ObsKind::idle: out << "idle"; break;
    case ObsKind::received: out << "received:" << o.sender; break;
    }
}

} // namespace

void save_trace_csv(const Trace& trace, std::ostream& out) {
    out.precision(17);
    out << "round,node,action,observation,noise\n";
    for (std::uint64_t t = 0; t < trace.rounds; ++t) {
        for (NodeId v = 0; v < trace.n; ++v) {
            const std::size_t i = trace.at(t, v);
            out << t << ',' << v << ',' << action_name(trace.actions[i]) << ',';
            print_obs(out, trace.obs[i]);
            out << ',' << trace.noise[i] << '\n';
        }
    }
}

void export_jam_schedule_csv(const Trace& trace, std::ostream& out) {
    out.precision(17);
    out << "round,node,noise\n";
    for (std::uint64_t t = 0; t < trace.rounds; ++t)
        for (NodeId v = 0; v < trace.n; ++v)
            out << t << ',' << v << ',' << trace.noise[trace.at(t, v)] << '\n';
}

namespace {

// Little-endian primitives for the binary framing.
template <class T>
void put(std::ostream& out, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    char buf[sizeof(T)];
    if constexpr (std::endian::native == std::endian::little) {
        std::memcpy(buf, &value, sizeof(T));
    } else {
        unsigned char tmp[sizeof(T)];
        std::memcpy(tmp, &value, sizeof(T));
        for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<char>(tmp[sizeof(T) - 1 - i]);
    }
    out.write(buf, sizeof(T));
}

template <class T>
T get(std::istream& in) {
    char buf[sizeof(T)];
    in.read(buf, sizeof(T));
    if (!in)
        throw ConfigError("trace file: truncated");
    if constexpr (std::endian::native != std::endian::little)
        std::reverse(buf, buf + sizeof(T));
    T value;
    std::memcpy(&value, buf, sizeof(T));
    return value;
}

constexpr char kMagic[4] = {'S', 'A', 'D', 'T'};
constexpr std::uint8_t kVersion = 1;

void put_config(std::ostream& out, const SimConfig& c) {
    put<std::uint8_t>(out, static_cast<std::uint8_t>(c.topology.kind));
    put<std::uint32_t>(out, c.topology.n);
    put<double>(out, c.topology.width);
    put<double>(out, c.topology.height);
    put<std::uint32_t>(out, c.topology.grid_side);
    put<double>(out, c.topology.sub_size);
    put<std::uint32_t>(out, c.topology.lambda_min);
    put<std::uint32_t>(out, c.topology.lambda_max);
    put<double>(out, c.phys.alpha);
    put<double>(out, c.phys.beta);
    put<double>(out, c.phys.theta);
    put<double>(out, c.phys.power);
    put<double>(out, c.phys.epsilon);
    put<double>(out, c.phys.cutoff_delta);
    put<std::uint8_t>(out, static_cast<std::uint8_t>(c.adversary.kind));
    put<double>(out, c.adversary.budget);
    put<std::uint64_t>(out, c.adversary.window);
    put<double>(out, c.adversary.epsilon);
    put<std::uint8_t>(out, c.adversary.uniform ? 1 : 0);
    put<std::uint8_t>(out, c.adversary.strided ? 1 : 0);
    put<double>(out, c.adversary.level);
    put<std::uint8_t>(out, static_cast<std::uint8_t>(c.protocol));
    put<double>(out, c.sade.gamma);
    put<double>(out, c.sade.p_hat);
    put<std::uint32_t>(out, c.backoff.cw_min);
    put<std::uint32_t>(out, c.backoff.cw_max);
    put<std::uint64_t>(out, c.rounds);
    put<std::uint64_t>(out, c.seed);
    put<std::uint64_t>(out, c.frame_len);
    put<double>(out, c.grid_cell);
}

SimConfig get_config(std::istream& in) {
    SimConfig c;
    c.topology.kind = static_cast<ScenarioKind>(get<std::uint8_t>(in));
    c.topology.n = get<std::uint32_t>(in);
    c.topology.width = get<double>(in);
    c.topology.height = get<double>(in);
    c.topology.grid_side = get<std::uint32_t>(in);
    c.topology.sub_size = get<double>(in);
    c.topology.lambda_min = get<std::uint32_t>(in);
    c.topology.lambda_max = get<std::uint32_t>(in);
    c.phys.alpha = get<double>(in);
    c.phys.beta = get<double>(in);
    c.phys.theta = get<double>(in);
    c.phys.power = get<double>(in);
    c.phys.epsilon = get<double>(in);
    c.phys.cutoff_delta = get<double>(in);
    c.adversary.kind = static_cast<JammerKind>(get<std::uint8_t>(in));
    c.adversary.budget = get<double>(in);
    c.adversary.window = get<std::uint64_t>(in);
    c.adversary.epsilon = get<double>(in);
    c.adversary.uniform = get<std::uint8_t>(in) != 0;
    c.adversary.strided = get<std::uint8_t>(in) != 0;
    c.adversary.level = get<double>(in);
    c.protocol = static_cast<ProtocolKind>(get<std::uint8_t>(in));
    c.sade.gamma = get<double>(in);
    c.sade.p_hat = get<double>(in);
    c.gamma_auto = false; // stored gamma is the resolved one
    c.backoff.cw_min = get<std::uint32_t>(in);
    c.backoff.cw_max = get<std::uint32_t>(in);
    c.rounds = get<std::uint64_t>(in);
    c.seed = get<std::uint64_t>(in);
    c.frame_len = get<std::uint64_t>(in);
    c.grid_cell = get<double>(in);
    return c;
}

} // namespace

void save_trace_binary(const Trace& trace, std::ostream& out) {
    out.write(kMagic, 4);
    put<std::uint8_t>(out, kVersion);
    put_config(out, trace.config);
    put<std::uint32_t>(out, trace.n);
    put<std::uint64_t>(out, trace.rounds);
    put<double>(out, trace.topo.width());
    put<double>(out, trace.topo.height());
    for (const Position& p : trace.topo.positions()) {
        put<double>(out, p.x);
        put<double>(out, p.y);
    }
    put<std::uint8_t>(out, trace.het_cell.empty() ? 0 : 1);
    for (std::uint32_t c : trace.het_cell)
        put<std::uint32_t>(out, c);
    const std::size_t total = static_cast<std::size_t>(trace.rounds) * trace.n;
    for (std::size_t i = 0; i < total; ++i) {
        put<std::uint8_t>(out, static_cast<std::uint8_t>(trace.actions[i]));
        put<std::uint8_t>(out, static_cast<std::uint8_t>(trace.obs[i].kind));
        put<std::uint32_t>(out, trace.obs[i].sender);
        put<double>(out, trace.noise[i]);
    }
    if (trace.config.protocol == ProtocolKind::sade) {
        for (const SadeState& s : trace.final_sade) {
            put<double>(out, s.p);
            put<std::uint64_t>(out, s.T_est);
            put<std::uint64_t>(out, s.c);
            put<std::uint8_t>(out, s.idle_in_window ? 1 : 0);
        }
    } else {
        for (const BackoffState& s : trace.final_backoff) {
            put<std::uint32_t>(out, s.cw);
            put<std::uint32_t>(out, s.timer);
        }
    }
}

Trace load_trace_binary(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw ConfigError("trace file: bad magic");
    if (get<std::uint8_t>(in) != kVersion)
        throw ConfigError("trace file: unsupported version");
    SimConfig config = get_config(in);
    const auto n = get<std::uint32_t>(in);
    const auto rounds = get<std::uint64_t>(in);
    const double width = get<double>(in);
    const double height = get<double>(in);
    std::vector<Position> positions(n);
    for (auto& p : positions) {
        p.x = get<double>(in);
        p.y = get<double>(in);
    }
    Trace trace{config, Topology(width, height, std::move(positions)), {}, n, rounds,
                {},     {},                                            {}, {}, {},
                {}};
    if (get<std::uint8_t>(in) != 0) {
        trace.het_cell.resize(n);
        for (auto& c : trace.het_cell)
            c = get<std::uint32_t>(in);
    }
    const std::size_t total = static_cast<std::size_t>(rounds) * n;
    trace.actions.resize(total);
    trace.obs.resize(total);
    trace.noise.resize(total);
    trace.pot_busy.resize(total);
    const double jam = config.phys.jam_threshold();
    for (std::size_t i = 0; i < total; ++i) {
        trace.actions[i] = static_cast<Action>(get<std::uint8_t>(in));
        trace.obs[i].kind = static_cast<ObsKind>(get<std::uint8_t>(in));
        trace.obs[i].sender = get<std::uint32_t>(in);
        trace.noise[i] = get<double>(in);
        trace.pot_busy[i] = trace.noise[i] >= jam ? 1 : 0;
    }
    if (config.protocol == ProtocolKind::sade) {
        trace.final_sade.resize(n);
        for (auto& s : trace.final_sade) {
            s.p = get<double>(in);
            s.T_est = get<std::uint64_t>(in);
            s.c = get<std::uint64_t>(in);
            s.idle_in_window = get<std::uint8_t>(in) != 0;
        }
    } else {
        trace.final_backoff.resize(n);
        for (auto& s : trace.final_backoff) {
            s.cw = get<std::uint32_t>(in);
            s.timer = get<std::uint32_t>(in);
        }
    }
    return trace;
}

void save_trace_binary_file(const Trace& trace, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ConfigError("cannot open for writing: " + path);
    save_trace_binary(trace, out);
}

Trace load_trace_binary_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open: " + path);
    return load_trace_binary(in);
}

} // namespace sade
