#include "gsnn/snapshot.hpp"

#include <array>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace gsnn {
namespace {

constexpr std::array<char, 4> kMagic = {'G', 'S', 'N', 'N'};
constexpr std::uint32_t kVersion = 1;

std::uint32_t crc32(const std::string& data) {
  static const auto table = [] {
    std::array<std::uint32_t, 256> t{};
    for (std::uint32_t i = 0; i < 256; ++i) {
      std::uint32_t c = i;
      for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xedb88320u ^ (c >> 1) : c >> 1;
      t[i] = c;
    }
    return t;
  }();
  std::uint32_t c = 0xffffffffu;
  for (unsigned char b : data) c = table[(c ^ b) & 0xffu] ^ (c >> 8);
  return c ^ 0xffffffffu;
}

// --- little-endian primitive I/O on string buffers -------------------------

template <typename T>
void put(std::string& buf, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  buf.append(bytes, sizeof(T));
}

void put_str(std::string& buf, const std::string& s) {
  put<std::uint32_t>(buf, static_cast<std::uint32_t>(s.size()));
  buf.append(s);
}

class Reader {
 public:
  Reader(const std::string& data, std::string section)
      : data_(data), section_(std::move(section)) {}

  template <typename T>
  T get() {
    static_assert(std::is_trivially_copyable_v<T>);
    need(sizeof(T));
    T value;
    std::memcpy(&value, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }

  std::string get_str() {
    auto n = get<std::uint32_t>();
    need(n);
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool exhausted() const { return pos_ == data_.size(); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > data_.size())
      throw IoError("snapshot: corrupt or truncated " + section_ + " section");
  }
  const std::string& data_;
  std::string section_;
  std::size_t pos_ = 0;
};

void put_section(std::string& out, const char tag[5], const std::string& body) {
  out.append(tag, 4);
  put<std::uint64_t>(out, body.size());
  out.append(body);
}

std::string serialize_registry(const EngramRegistry& reg) {
  std::string b;
  put<std::uint32_t>(b, reg.n_neurons());
  put<double>(b, reg.lambda());
  put<double>(b, reg.rho_inh());
  put<std::uint32_t>(b, static_cast<std::uint32_t>(reg.size()));
  for (const auto& label : reg.labels()) {
    const Engram& e = reg.at(label);
    put_str(b, e.label);
    put<std::uint8_t>(b, static_cast<std::uint8_t>(e.kind));
    put<std::uint32_t>(b, e.size());
    for (NeuronId id : e.members) put<std::uint32_t>(b, id);
    for (std::uint8_t f : e.inhibitory) put<std::uint8_t>(b, f);
  }
  return b;
}

std::string serialize_state(const NetworkState& st) {
  std::string b;
  const auto n = static_cast<std::uint32_t>(st.v.size());
  put<std::uint32_t>(b, n);
  put<double>(b, st.clock_ms);
  for (std::uint32_t i = 0; i < n; ++i) put<double>(b, st.v[i]);
  for (std::uint32_t i = 0; i < n; ++i) put<double>(b, st.refractory_ms[i]);
  for (std::uint32_t i = 0; i < n; ++i) put<double>(b, st.trace[i]);
  for (std::uint32_t i = 0; i < n; ++i) put<double>(b, st.last_spike_ms[i]);
  for (std::uint32_t i = 0; i < n; ++i) put<std::uint8_t>(b, st.inhibitory[i]);
  for (std::uint32_t i = 0; i < n; ++i) put<std::uint8_t>(b, st.polarity_locked[i]);
  put<std::uint32_t>(b, static_cast<std::uint32_t>(st.prev_fired.size()));
  for (NeuronId id : st.prev_fired) put<std::uint32_t>(b, id);
  put<std::uint32_t>(b, static_cast<std::uint32_t>(st.recent_spikes.size()));
  for (const auto& sp : st.recent_spikes) {
    put<double>(b, sp.t_ms);
    put<std::uint32_t>(b, sp.id);
  }
  return b;
}

std::string serialize_synapses(const SynapseTable& syn) {
  syn.realize_all_decay();
  std::string b;
  put<std::uint32_t>(b, syn.plasticity_step());
  put<std::uint32_t>(b, syn.n_neurons());
  for (NeuronId pre = 0; pre < syn.n_neurons(); ++pre) {
    const auto& row = syn.row(pre);
    put<std::uint32_t>(b, static_cast<std::uint32_t>(row.size()));
    for (const Synapse& s : row) {
      put<std::uint32_t>(b, s.post);
      put<double>(b, s.w);
      put<double>(b, s.e);
    }
  }
  return b;
}

}  // namespace

void save_snapshot(const Network& net, const std::string& path) {
  std::string payload;
  put_section(payload, "PARM", echo_config(net.params));
  put_section(payload, "REGY", serialize_registry(net.registry));
  put_section(payload, "NEUR", serialize_state(net.state));
  put_section(payload, "SYNS", serialize_synapses(net.synapses));

  std::string out;
  out.append(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, kVersion);
  out.append(payload);
  put<std::uint32_t>(out, crc32(payload));

  std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write snapshot: " + tmp);
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw IoError("error writing snapshot: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename snapshot into place: " + path + ": " + ec.message());
}

Network load_snapshot(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open snapshot: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  std::string data = ss.str();

  if (data.size() < 12 || std::memcmp(data.data(), kMagic.data(), 4) != 0)
    throw IoError("snapshot: bad magic in header (not a GSNN snapshot): " + path);
  std::uint32_t version;
  std::memcpy(&version, data.data() + 4, 4);
  if (version != kVersion)
    throw IoError("snapshot: unsupported format version " + std::to_string(version));

  std::string payload = data.substr(8, data.size() - 12);
  std::uint32_t stored_crc;
  std::memcpy(&stored_crc, data.data() + data.size() - 4, 4);
  if (crc32(payload) != stored_crc)
    throw IoError("snapshot: checksum mismatch (corrupt file): " + path);

  // Carve sections.
  std::map<std::string, std::string> sections;
  std::size_t pos = 0;
  while (pos < payload.size()) {
    if (pos + 12 > payload.size())
      throw IoError("snapshot: corrupt or truncated section table");
    std::string tag = payload.substr(pos, 4);
    std::uint64_t len;
    std::memcpy(&len, payload.data() + pos + 4, 8);
    pos += 12;
    if (pos + len > payload.size())
      throw IoError("snapshot: corrupt or truncated " + tag + " section");
    sections[tag] = payload.substr(pos, len);
    pos += len;
  }
  for (const char* tag : {"PARM", "REGY", "NEUR", "SYNS"})
    if (!sections.count(tag))
      throw IoError(std::string("snapshot: missing ") + tag + " section");

  // PARM
  SimParams params;
  std::istringstream cfg(sections["PARM"]);
  apply_config_stream(cfg, params, path + "#PARM");
  Network net(params);

  // REGY
  {
    Reader r(sections["REGY"], "REGY");
    auto n = r.get<std::uint32_t>();
    auto lambda = r.get<double>();
    auto rho = r.get<double>();
    net.registry = EngramRegistry(n, lambda, rho);
    auto count = r.get<std::uint32_t>();
    for (std::uint32_t i = 0; i < count; ++i) {
      Engram e;
      e.label = r.get_str();
      e.kind = static_cast<SymbolKind>(r.get<std::uint8_t>());
      auto k = r.get<std::uint32_t>();
      e.members.resize(k);
      for (auto& id : e.members) id = r.get<std::uint32_t>();
      e.inhibitory.resize(k);
      for (auto& fl : e.inhibitory) fl = r.get<std::uint8_t>();
      net.registry.add(std::move(e));
    }
    if (!r.exhausted()) throw IoError("snapshot: trailing bytes in REGY section");
  }

  // NEUR
  {
    Reader r(sections["NEUR"], "NEUR");
    auto n = r.get<std::uint32_t>();
    if (n != net.params.n_neurons)
      throw IoError("snapshot: NEUR section neuron count disagrees with PARM");
    net.state.init(n, net.params.v_reset_mv);
    net.state.clock_ms = r.get<double>();
    for (std::uint32_t i = 0; i < n; ++i) net.state.v[i] = r.get<double>();
    for (std::uint32_t i = 0; i < n; ++i) net.state.refractory_ms[i] = r.get<double>();
    for (std::uint32_t i = 0; i < n; ++i) net.state.trace[i] = r.get<double>();
    for (std::uint32_t i = 0; i < n; ++i) net.state.last_spike_ms[i] = r.get<double>();
    for (std::uint32_t i = 0; i < n; ++i) net.state.inhibitory[i] = r.get<std::uint8_t>();
    for (std::uint32_t i = 0; i < n; ++i) net.state.polarity_locked[i] = r.get<std::uint8_t>();
    auto n_prev = r.get<std::uint32_t>();
    net.state.prev_fired.resize(n_prev);
    for (auto& id : net.state.prev_fired) id = r.get<std::uint32_t>();
    auto n_recent = r.get<std::uint32_t>();
    for (std::uint32_t i = 0; i < n_recent; ++i) {
      double t = r.get<double>();
      auto id = r.get<std::uint32_t>();
      net.state.recent_spikes.push_back({t, id});
    }
    if (!r.exhausted()) throw IoError("snapshot: trailing bytes in NEUR section");
  }

  // SYNS
  {
    Reader r(sections["SYNS"], "SYNS");
    auto now = r.get<std::uint32_t>();
    auto n = r.get<std::uint32_t>();
    if (n != net.params.n_neurons)
      throw IoError("snapshot: SYNS section neuron count disagrees with PARM");
    std::vector<std::vector<Synapse>> rows(n);
    for (std::uint32_t pre = 0; pre < n; ++pre) {
      auto count = r.get<std::uint32_t>();
      rows[pre].resize(count);
      for (auto& s : rows[pre]) {
        s.post = r.get<std::uint32_t>();
        s.w = r.get<double>();
        s.e = r.get<double>();
        s.last_update = now;
      }
    }
    if (!r.exhausted()) throw IoError("snapshot: trailing bytes in SYNS section");
    net.synapses.restore(now, std::move(rows));
  }
  return net;
}

nlohmann::json snapshot_debug_json(const Network& net) {
  nlohmann::json doc;
  doc["format"] = "gsnn-snapshot-debug";
  doc["version"] = kVersion;

  nlohmann::json params;
  std::istringstream cfg(echo_config(net.params));
  std::string line;
  while (std::getline(cfg, line)) {
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(0, eq - 1);
    params[key] = line.substr(eq + 2);
  }
  doc["params"] = params;

  auto& reg = doc["registry"] = nlohmann::json::array();
  for (const auto& label : net.registry.labels()) {
    const Engram& e = net.registry.at(label);
    reg.push_back({{"label", e.label},
                   {"kind", e.kind == SymbolKind::Relation ? "relation" : "entity"},
                   {"members", e.members},
                   {"inhibitory", e.inhibitory}});
  }

  const auto& st = net.state;
  nlohmann::json state;
  state["clock_ms"] = st.clock_ms;
  state["v"] = std::vector<double>(st.v.begin(), st.v.end());
  state["refractory_ms"] = std::vector<double>(st.refractory_ms.begin(), st.refractory_ms.end());
  state["trace"] = std::vector<double>(st.trace.begin(), st.trace.end());
  state["last_spike_ms"] = std::vector<double>(st.last_spike_ms.begin(), st.last_spike_ms.end());
  state["inhibitory"] = st.inhibitory;
  state["polarity_locked"] = st.polarity_locked;
  state["prev_fired"] = st.prev_fired;
  auto& recent = state["recent_spikes"] = nlohmann::json::array();
  for (const auto& sp : st.recent_spikes) recent.push_back({{"t_ms", sp.t_ms}, {"id", sp.id}});
  doc["state"] = std::move(state);

  net.synapses.realize_all_decay();
  auto& syn = doc["synapses"] = nlohmann::json::array();
  for (NeuronId pre = 0; pre < net.synapses.n_neurons(); ++pre)
    for (const Synapse& s : net.synapses.row(pre))
      syn.push_back({{"pre", pre}, {"post", s.post}, {"w", s.w}, {"e", s.e}});
  doc["plasticity_step"] = net.synapses.plasticity_step();
  return doc;
}

}  // namespace gsnn
