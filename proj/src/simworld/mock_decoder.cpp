#include "treemem/simworld/mock_decoder.hpp"

#include "treemem/core/counter_rng.hpp"
#include "treemem/core/errors.hpp"
#include "treemem/metrics/region.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>

namespace treemem::simworld {

namespace {

enum Channel : std::uint64_t { kJitter = 1, kRating = 2, kPath = 3, kOcclusion = 4, kIdentity = 5 };

void put_u64(Bytes& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_u64(const Bytes& in, std::size_t at) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in[at + i]) << (8 * i);
    return v;
}

constexpr std::size_t kFactsSize = 4 + 8 * 4;
constexpr std::uint8_t kFactsTag[4] = {'S', 'I', 'M', '1'};

double iou(const Mask& a, const Mask& b) { return metrics::region_j(a, b); }

}  // namespace

Bytes encode_facts(const MaskFacts& f) {
    Bytes out(kFactsTag, kFactsTag + 4);
    put_u64(out, f.id);
    put_u64(out, std::bit_cast<std::uint64_t>(f.target_iou));
    put_u64(out, std::bit_cast<std::uint64_t>(f.distractor_iou));
    put_u64(out, static_cast<std::uint64_t>(static_cast<std::int64_t>(f.distractor_id)));
    return out;
}

std::optional<MaskFacts> decode_facts(const Bytes& p) {
    if (p.size() != kFactsSize || !std::equal(kFactsTag, kFactsTag + 4, p.begin())) return std::nullopt;
    MaskFacts f;
    f.id = get_u64(p, 4);
    f.target_iou = std::bit_cast<double>(get_u64(p, 12));
    f.distractor_iou = std::bit_cast<double>(get_u64(p, 20));
    f.distractor_id = static_cast<int>(static_cast<std::int64_t>(get_u64(p, 28)));
    return f;
}

MockDecoder::MockDecoder(ScenarioSpec spec) : spec_(std::move(spec)) {
    validate(spec_);
    frames_.reserve(static_cast<std::size_t>(spec_.num_frames));
    for (int t = 0; t < spec_.num_frames; ++t) frames_.push_back(render_ground_truth(spec_, t));
}

const GroundTruthFrame& MockDecoder::ground_truth(int t) const {
    if (t < 0 || t >= spec_.num_frames) throw DomainError("frame " + std::to_string(t) + " outside the scenario");
    return frames_[static_cast<std::size_t>(t)];
}

MaskFacts MockDecoder::facts_for(int object_id, int t, const Mask& mask, std::uint64_t id) const {
    const auto& gt = ground_truth(t);
    MaskFacts f;
    f.id = id;
    f.target_iou = iou(mask, gt.mask_of(object_id));
    for (std::size_t i = 0; i < gt.ids.size(); ++i) {
        if (gt.ids[i] == object_id || !gt.visible[i] || gt.masks[i].none()) continue;
        const double v = iou(mask, gt.masks[i]);
        if (v > f.distractor_iou) {
            f.distractor_iou = v;
            f.distractor_id = gt.ids[i];
        }
    }
    return f;
}

BankConsistency MockDecoder::consistency(int object_id, const memory::MemoryBankView& bank) const {
    double total = 0.0;
    double target = 0.0;
    std::map<int, double> distractors;
    for (const auto& e : bank.entries) {
        const auto& r = e.record();
        auto facts = decode_facts(r.payload);
        if (!facts) facts = facts_for(object_id, r.frame_index, r.mask, 0);
        total += e.weight;
        if (facts->target_iou >= 0.5) target += e.weight;
        if (facts->distractor_id >= 0 && facts->distractor_iou >= 0.5) distractors[facts->distractor_id] += e.weight;
    }
    BankConsistency out;
    if (!(total > 0.0)) return out;
    out.target_mass = std::clamp(target / total, 0.0, 1.0);
    for (const auto& [id, mass] : distractors) {
        if (mass > out.distractor_mass) {
            out.distractor_mass = std::clamp(mass / total, 0.0, 1.0);
            out.distractor_id = id;
        }
    }
    return out;
}

Bytes MockDecoder::encode_prompt(int object_id, const std::string& frame_ref, const Mask& mask) {
    int t = 0;
    try {
        t = std::stoi(frame_ref);
    } catch (const std::exception&) {
        throw DomainError("simulator frame reference '" + frame_ref + "' is not a frame index");
    }
    const auto id = CounterRng({spec_.seed, static_cast<std::uint64_t>(object_id), kIdentity}).next_u64();
    return encode_facts(facts_for(object_id, t, mask, id));
}

backend::DecodeResponse MockDecoder::decode(const backend::DecodeRequest& request) {
    const int t = request.time;
    const int oid = request.object_id;
    const auto& gt = ground_truth(t);
    const auto& target = spec_.object(oid);
    const auto& noise = spec_.noise;
    if (request.bank.entries.empty()) throw DomainError("simulator decode with an empty bank");

    const auto cons = consistency(oid, request.bank);
    const bool believes_distractor = cons.distractor_id >= 0 && cons.distractor_mass >= 0.5;
    const int belief_id = believes_distractor ? cons.distractor_id : oid;
    const double c = believes_distractor ? cons.distractor_mass : cons.target_mass;
    const double q = std::pow(c, noise.consistency_power);
    const bool target_hidden = target.hidden_at(t);

    // Nearest visible other object to the tracked object's position.
    const auto target_place = placement_at(target, t);
    const ObjectSpec* alt = nullptr;
    double best = 0.0;
    for (const auto& o : spec_.objects) {
        if (o.id == oid || o.hidden_at(t)) continue;
        const auto p = placement_at(o, t);
        const double dist = std::hypot(p.cx - target_place.cx, p.cy - target_place.cy);
        if (!alt || dist < best) {
            alt = &o;
            best = dist;
        }
    }

    std::optional<Placement> a;
    if (!target_hidden) {
        a = target_place;
        if (alt) {
            const auto p = placement_at(*alt, t);
            a->cx = std::lerp(a->cx, p.cx, 1.0 - cons.target_mass);
            a->cy = std::lerp(a->cy, p.cy, 1.0 - cons.target_mass);
        }
    } else if (believes_distractor && !spec_.object(belief_id).hidden_at(t)) {
        a = placement_at(spec_.object(belief_id), t);
    }
    std::optional<Placement> b;
    if (alt) {
        b = placement_at(*alt, t);
    } else if (a) {
        b = a;
        b->width += 2.0;
        b->height += 2.0;
    }
    std::optional<Placement> cc;
    if (a) {
        cc = a;
        cc->width *= 0.5;
        cc->height *= 0.5;
    }

    std::uint64_t path = 0x5157;
    for (const auto& e : request.bank.entries) {
        const auto facts = decode_facts(e.record().payload);
        path = mix64(path ^ (facts ? facts->id : static_cast<std::uint64_t>(e.record().frame_index)));
    }

    const auto seed = spec_.seed;
    const auto uo = static_cast<std::uint64_t>(oid);
    const auto ut = static_cast<std::uint64_t>(t);
    const Mask& belief_mask = gt.mask_of(belief_id);
    const Mask empty(spec_.width, spec_.height);

    double occ;
    if (target_hidden) {
        occ = CounterRng({seed, uo, ut, kOcclusion}).uniform(-noise.uncertain_band, noise.uncertain_band);
    } else if (gt.visible_of(belief_id)) {
        occ = noise.occ_margin * c;
    } else {
        occ = -noise.occ_margin;
    }

    backend::DecodeResponse out;
    const std::optional<Placement>* shapes[3] = {&a, &b, &cc};
    for (int k = 0; k < 3; ++k) {
        const auto uk = static_cast<std::uint64_t>(k);
        std::optional<Placement> place = *shapes[k];
        if (place) {
            CounterRng jitter({seed, uo, ut, kJitter, uk});
            if (jitter.bernoulli(noise.mask_jitter)) {
                const double delta = jitter.bernoulli(0.5) ? 1.0 : -1.0;
                place->width = std::max(0.0, place->width + delta);
                place->height = std::max(0.0, place->height + delta);
            }
        }
        Mask mask = place ? rasterize(*place, spec_.width, spec_.height) : empty;

        double base;
        if (target_hidden && !believes_distractor) {
            if (mask.none()) {
                base = noise.occluded_empty_iou;
            } else {
                base = alt ? alt->distractor_similarity * iou(mask, gt.mask_of(alt->id)) : 0.0;
            }
        } else {
            base = iou(mask, belief_mask);
        }
        double rating = base * q;
        rating += noise.iou_calibration_noise * CounterRng({seed, uo, ut, kRating, uk}).normal();
        rating += noise.path_noise * CounterRng({seed, uo, ut, kPath, uk, path}).normal();
        rating = std::clamp(rating, 0.0, 1.0);

        const auto id = mix64(path ^ mix64(ut * 3 + uk + 1));
        auto facts = facts_for(oid, t, mask, id);
        out.candidates[static_cast<std::size_t>(k)] =
            CandidatePrediction{std::move(mask), rating, occ, encode_facts(facts)};
    }
    return out;
}

FrameRecord prompt_record(backend::DecoderBackend& decoder, const ScenarioSpec& spec, int object_id) {
    auto mask = render_ground_truth(spec, 0).mask_of(object_id);
    auto payload = decoder.encode_prompt(object_id, backend::frame_ref_for(0), mask);
    return make_prompt_record(0, std::move(mask), std::move(payload));
}

}  // namespace treemem::simworld
