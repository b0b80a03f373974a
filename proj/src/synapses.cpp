#include "gsnn/synapses.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

namespace gsnn {

namespace {
constexpr double kEligibilityFloor = 1e-12;  // below this, e is treated as dead

std::uint64_t hash_bytes(std::uint64_t h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint32_t mix_id(NeuronId post) {
  std::uint32_t x = post;
  x ^= x >> 16;
  x *= 0x7feb352du;
  x ^= x >> 15;
  x *= 0x846ca68bu;
  x ^= x >> 16;
  return x;
}
}  // namespace

Synapse* SynapseTable::Row::find(NeuronId post) {
  if (buckets.empty()) return nullptr;
  std::uint32_t mask = static_cast<std::uint32_t>(buckets.size()) - 1;
  for (std::uint32_t slot = mix_id(post) & mask;; slot = (slot + 1) & mask) {
    std::uint32_t idx = buckets[slot];
    if (idx == 0) return nullptr;
    if (entries[idx - 1].post == post) return &entries[idx - 1];
  }
}

const Synapse* SynapseTable::Row::find(NeuronId post) const {
  return const_cast<Row*>(this)->find(post);
}

void SynapseTable::Row::rehash(std::size_t capacity) {
  std::size_t size = 16;
  while (size < capacity * 2) size <<= 1;
  buckets.assign(size, 0);
  std::uint32_t mask = static_cast<std::uint32_t>(size) - 1;
  for (std::uint32_t i = 0; i < entries.size(); ++i) {
    std::uint32_t slot = mix_id(entries[i].post) & mask;
    while (buckets[slot] != 0) slot = (slot + 1) & mask;
    buckets[slot] = i + 1;
  }
}

Synapse& SynapseTable::Row::insert(NeuronId post, std::uint32_t now) {
  if (buckets.size() < (entries.size() + 1) * 2) rehash(entries.size() + 1);
  Synapse s;
  s.post = post;
  s.last_update = now;
  entries.push_back(s);
  std::uint32_t mask = static_cast<std::uint32_t>(buckets.size()) - 1;
  std::uint32_t slot = mix_id(post) & mask;
  while (buckets[slot] != 0) slot = (slot + 1) & mask;
  buckets[slot] = static_cast<std::uint32_t>(entries.size());
  return entries.back();
}

const Synapse* SynapseTable::find(NeuronId pre, NeuronId post) const {
  return rows_[pre].find(post);
}

Synapse& SynapseTable::find_or_create(NeuronId pre, NeuronId post) {
  Row& row = rows_[pre];
  if (Synapse* s = row.find(post)) return *s;
  ++n_synapses_;
  return row.insert(post, now_);
}

void SynapseTable::realize(Synapse& s) const {
  if (s.last_update == now_) return;
  if (s.e != 0.0) {
    std::uint32_t k = now_ - s.last_update;
    // Iterated Euler decay; pow only for long gaps.
    if (k <= 8) {
      for (std::uint32_t i = 0; i < k; ++i) s.e *= decay_per_step_;
    } else {
      s.e *= std::pow(decay_per_step_, static_cast<double>(k));
    }
    if (std::abs(s.e) < kEligibilityFloor) s.e = 0.0;
  }
  s.last_update = now_;
}

bool SynapseTable::exists(NeuronId pre, NeuronId post) const {
  return find(pre, post) != nullptr;
}

double SynapseTable::weight(NeuronId pre, NeuronId post) const {
  const Synapse* s = find(pre, post);
  return s ? s->w : 0.0;
}

double SynapseTable::eligibility(NeuronId pre, NeuronId post) const {
  const Synapse* s = find(pre, post);
  if (!s) return 0.0;
  realize(*const_cast<Synapse*>(s));
  return s->e;
}

void SynapseTable::propagate(NeuronId pre, double unit_pulse_na, Vec& drive_na) const {
  for (const Synapse& s : rows_[pre].entries)
    if (s.w != 0.0) drive_na[s.post] += s.w * unit_pulse_na;
}

void SynapseTable::add_weight(NeuronId pre, NeuronId post, double signed_delta,
                              double w_max, bool inhibitory_pre) {
  Synapse& s = find_or_create(pre, post);
  s.w += signed_delta;
  if (inhibitory_pre)
    s.w = std::clamp(s.w, -w_max, 0.0);
  else
    s.w = std::clamp(s.w, 0.0, w_max);
}

void SynapseTable::add_eligibility(NeuronId pre, NeuronId post, double signed_delta) {
  Synapse& s = find_or_create(pre, post);
  realize(s);
  s.e += signed_delta;
  if (!s.in_active_set && s.e != 0.0) {
    s.in_active_set = 1;
    active_.emplace_back(pre, post);
  }
}

void SynapseTable::tick(double dt_ms, double tau_e_ms) {
  decay_per_step_ = 1.0 - dt_ms / tau_e_ms;
  ++now_;
}

void SynapseTable::apply_reward(double r, double eta, double w_max,
                                const std::vector<std::uint8_t>& inhibitory) {
  if (r == 0.0 || eta == 0.0) return;
  std::size_t kept = 0;
  for (auto [pre, post] : active_) {
    Synapse& s = *rows_[pre].find(post);
    realize(s);
    if (s.e == 0.0) {
      s.in_active_set = 0;  // decayed out; drop from the active set
      continue;
    }
    s.w += eta * r * s.e;
    if (inhibitory[pre])
      s.w = std::clamp(s.w, -w_max, 0.0);
    else
      s.w = std::clamp(s.w, 0.0, w_max);
    active_[kept++] = {pre, post};
  }
  active_.resize(kept);
}

void SynapseTable::reset_eligibility() {
  for (auto [pre, post] : active_) {
    Synapse& s = *rows_[pre].find(post);
    s.e = 0.0;
    s.in_active_set = 0;
    s.last_update = now_;
  }
  active_.clear();
}

double SynapseTable::mean_weight(const std::vector<NeuronId>& pre_ids,
                                 const std::vector<NeuronId>& post_ids) const {
  if (pre_ids.empty() || post_ids.empty()) return 0.0;
  std::vector<NeuronId> posts = post_ids;
  std::sort(posts.begin(), posts.end());
  double sum = 0.0;
  for (NeuronId pre : pre_ids)
    for (const Synapse& s : rows_[pre].entries)
      if (std::binary_search(posts.begin(), posts.end(), s.post)) sum += s.w;
  return sum / (static_cast<double>(pre_ids.size()) * static_cast<double>(posts.size()));
}

std::vector<Synapse> SynapseTable::sorted_row(NeuronId pre) const {
  std::vector<Synapse> row = rows_[pre].entries;
  for (Synapse& s : row) realize(s);
  std::sort(row.begin(), row.end(),
            [](const Synapse& a, const Synapse& b) { return a.post < b.post; });
  return row;
}

void SynapseTable::realize_all_decay() const {
  for (auto& row : rows_)
    for (auto& s : row.entries) realize(const_cast<Synapse&>(s));
}

void SynapseTable::restore(std::uint32_t now, std::vector<std::vector<Synapse>> rows) {
  now_ = now;
  rows_.assign(rows.size(), Row{});
  active_.clear();
  n_synapses_ = 0;
  for (NeuronId pre = 0; pre < rows.size(); ++pre) {
    Row& row = rows_[pre];
    row.entries = std::move(rows[pre]);
    row.rehash(row.entries.size() + 1);
    n_synapses_ += row.entries.size();
    for (auto& s : row.entries) {
      s.in_active_set = 0;
      if (s.e != 0.0) {
        s.in_active_set = 1;
        active_.emplace_back(pre, s.post);
      }
    }
  }
}

std::uint64_t SynapseTable::state_hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (NeuronId pre = 0; pre < rows_.size(); ++pre)
    for (const Synapse& s : sorted_row(pre)) {
      if (s.w == 0.0 && s.e == 0.0) continue;  // semantically absent
      h = hash_bytes(h, &pre, sizeof(pre));
      h = hash_bytes(h, &s.post, sizeof(s.post));
      h = hash_bytes(h, &s.w, sizeof(s.w));
      h = hash_bytes(h, &s.e, sizeof(s.e));
    }
  return h;
}

void SynapseTable::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write synapse CSV: " + path);
  out << "pre_id,post_id,weight,eligibility\n";
  out.precision(17);
  for (NeuronId pre = 0; pre < rows_.size(); ++pre)
    for (const Synapse& s : sorted_row(pre))
      out << pre << ',' << s.post << ',' << s.w << ',' << s.e << '\n';
  if (!out) throw IoError("error writing synapse CSV: " + path);
}

}  // namespace gsnn
