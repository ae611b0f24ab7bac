// Acceptance runner: one PASS/FAIL line per criterion.
//   acceptance            all criteria
//   acceptance -c 4       one criterion

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "oracle.hpp"
#include "setd2d/setd2d.hpp"

using namespace setd2d;

namespace {

struct Verdict {
    std::ostringstream detail;
    std::vector<std::string> failures;

    bool pass() const { return failures.empty(); }
    void require(bool ok, const std::string& what) {
        if (!ok) failures.push_back(what);
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Scenario load(const std::string& name) {
    return config::from_ptree(config::read_ini_file(std::string(SETD2D_CONFIG_DIR) + "/" + name));
}

// One-sided exact sign test: P(X >= wins) for X ~ Bin(n, 1/2).
double sign_test_p(int wins, int n) {
    double p = 0;
    for (int k = wins; k <= n; ++k) p += std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) - n * std::log(2.0));
    return p;
}

// --- 1: trust math vs the independent evaluator ---
Verdict c1() {
    Verdict v;
    auto t0 = Clock::now();
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<> u(0, 1);
    trust::TrustWeights w;
    oracle::Weights ow;
    double worst = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        // the evaluated pair plus two other receivers of the same relay, for sr
        trust::HistoryStore store;
        std::vector<std::vector<oracle::Rec>> per_receiver(3);
        for (std::uint32_t rx = 1; rx <= 3; ++rx) {
            int sh = static_cast<int>(rng() % 51);
            double t = 0;
            for (int k = 0; k < sh; ++k) {
                t += rng() % 5 == 0 ? 0.0 : 20.0 * u(rng);  // some equal timestamps
                trust::InteractionRecord r;
                r.timestamp = t;
                r.satisfaction = (rng() % 5) / 4.0;
                r.importance = 0.1 + 0.9 * u(rng);
                store.record({node(rx), node(0)}, r);
                per_receiver[rx - 1].push_back({t, r.satisfaction, r.importance});
            }
        }
        NodePair p{node(1), node(0)};
        const auto& h = per_receiver[0];
        double now = (h.empty() ? 0.0 : h.back().t) + (rng() % 3 == 0 ? 0.0 : 30.0 * u(rng));
        double F = u(rng), R = u(rng), I = u(rng);
        double sr = store.reputation(node(0), w.reputation_default);
        auto s = trust::service_trust(store.history(p), {F, R, I}, sr, w, now);
        auto o = oracle::evaluate(h, F, R, I, oracle::reputation(per_receiver, w.reputation_default), now, ow);
        for (double d : {s.scb - o.scb, s.so_lon - o.so_lon, s.so_rec - o.so_rec, s.sib - o.sib, s.sr - o.sr, s.st - o.st})
            worst = std::max(worst, std::fabs(d));
    }
    double secs = seconds_since(t0);
    v.detail << "max |diff| " << worst << ", " << secs << " s";
    v.require(worst <= 1e-9, "difference above 1e-9");
    v.require(secs < 10.0, "runtime above 10 s");
    return v;
}

// --- 2: all-good history, windowed vs sort integrity ---
Verdict c2() {
    Verdict v;
    auto sc = load("figCI.ini");
    auto tr = sim::run_trace_experiment(sc);
    auto win = tr.series("windowed"), srt = tr.series("sort");
    v.require(win.size() == 101 && srt.size() == 101, "expected sh = 0..100");
    if (!v.pass()) return v;
    for (std::size_t k = 0; k < win.size(); ++k) {
        if (win[k].snapshot.sib != 0.0) v.require(false, "sib != 0 at sh=" + std::to_string(k));
        if (k && !(win[k].snapshot.st > win[k - 1].snapshot.st)) v.require(false, "st not increasing at sh=" + std::to_string(k));
        if (k && !(srt[k].snapshot.st < win[k].snapshot.st)) v.require(false, "sort st not lower at sh=" + std::to_string(k));
    }
    double last = win.back().snapshot.st;
    v.require(last >= 0.9, "st(100) below 0.9");
    v.detail << "st(1)=" << win[1].snapshot.st << " st(100)=" << last
             << " sort st(100)=" << srt.back().snapshot.st;
    return v;
}

// --- 3: decay orderings ---
Verdict c3() {
    Verdict v;
    for (auto [file, reverse] : {std::pair{"fig5a.ini", false}, {"fig5b.ini", true}}) {
        auto tr = sim::run_trace_experiment(load(file));
        double a = tr.series("mu=1,nu=0").back().snapshot.scb;
        double b = tr.series("mu=0.5,nu=0.5").back().snapshot.scb;
        double c = tr.series("mu=0,nu=1").back().snapshot.scb;
        bool ok = reverse ? (a < b && b < c) : (a > b && b > c);
        v.require(ok, std::string(file) + " ordering");
        v.detail << (reverse ? "long" : "short") << ": " << a << ", " << b << ", " << c << "  ";
    }
    return v;
}

// Net change of st over each maximal same-decision run, from the value
// entering the run to the value after its last round. The first
// interaction is excluded.
struct Coherence {
    int runs = 0;
    int net_violations = 0;
    int step_violations = 0;
};

Coherence coherence(const std::vector<sim::TracePoint>& pts) {
    Coherence c;
    std::size_t k = 1;
    while (k < pts.size()) {
        std::size_t e = k;
        while (e + 1 < pts.size() && pts[e + 1].decision == pts[k].decision) ++e;
        bool honest = pts[k].decision == attack::Decision::honest;
        double before = pts[k - 1].snapshot.st, after = pts[e].snapshot.st;
        ++c.runs;
        if (honest ? after < before : after > before) ++c.net_violations;
        for (std::size_t j = k; j <= e; ++j) {
            double d = pts[j].snapshot.st - pts[j - 1].snapshot.st;
            if (honest ? d < 0 : d > 0) ++c.step_violations;
        }
        k = e + 1;
    }
    return c;
}

// --- 4: on-off trace coherence ---
Verdict c4() {
    Verdict v;
    auto consecutive = sim::run_trace_experiment(load("fig6.ini"));
    auto irregular = sim::run_trace_experiment(load("fig7.ini"));
    auto check = [&](const sim::TraceResult& tr, const std::string& label) {
        auto c = coherence(tr.series(label));
        v.detail << label << " net " << c.net_violations << "/" << c.runs << " (step " << c.step_violations << ")  ";
        v.require(c.runs > 0 && c.net_violations == 0, label);
    };
    for (double rate : {0.3, 0.5, 0.8}) {
        std::string r = sim::detail::fmt_double(rate);
        check(consecutive, "initial-" + r);
        check(consecutive, "final-" + r);
        check(irregular, "irregular-" + r);
    }
    return v;
}

// --- 5: integrity weight under the periodic attack ---
Verdict c5() {
    Verdict v;
    auto sc = load("fig9.ini");
    auto tr = sim::run_trace_experiment(sc);
    std::vector<std::vector<sim::TracePoint>> s;
    for (double b2 : sc.trace.beta2_values) s.push_back(tr.series("beta2=" + sim::detail::fmt_double(b2)));
    int boundaries = 0;
    for (std::size_t k = 0; k < s[0].size(); ++k) {
        bool end_of_burst = s[0][k].decision == attack::Decision::tamper &&
                            (k + 1 == s[0].size() || s[0][k + 1].decision == attack::Decision::honest);
        if (!end_of_burst) continue;
        ++boundaries;
        for (std::size_t j = 1; j < s.size(); ++j)
            if (!(s[j][k].snapshot.st < s[j - 1][k].snapshot.st))
                v.require(false, "not decreasing at round " + std::to_string(s[0][k].round));
        if (boundaries == 1)
            v.detail << "round " << s[0][k].round << ": " << s[0][k].snapshot.st << " > " << s[1][k].snapshot.st << " > "
                     << s[2][k].snapshot.st << "; ";
    }
    v.require(boundaries > 0, "no burst boundary in the trace");
    v.detail << boundaries << " boundaries";
    return v;
}

// --- 6: receiver-selective separation ---
Verdict c6() {
    Verdict v;
    auto sc = load("fig8.ini");
    sc.trace.rounds = 20;
    auto tr = sim::run_trace_experiment(sc);
    double victim = tr.series("selective", node(1)).back().snapshot.st;
    double others = 1.0;
    for (std::uint32_t r = 2; r <= sc.trace.receivers; ++r)
        others = std::min(others, tr.series("selective", node(r)).back().snapshot.st);
    v.detail << "victim " << victim << ", lowest non-victim " << others << ", gap " << others - victim;
    v.require(victim < others, "ordering");
    v.require(others - victim >= 0.2, "gap below 0.2");
    return v;
}

// --- 7: threshold sweep ---
Verdict c7() {
    Verdict v;
    auto t0 = Clock::now();
    auto base = load("fig3.ini");
    const std::vector<double> thresholds{0.1, 0.2, 0.3, 0.4, 0.5, 0.6}, fractions{0.15, 0.3, 0.45, 0.6};
    const int seeds = 20;
    std::map<std::pair<double, double>, double> mean;
    for (double f : fractions)
        for (double th : thresholds) {
            double sum = 0;
            for (int s = 1; s <= seeds; ++s) {
                auto sc = base;
                sc.malicious_fraction = f;
                sc.weights.threshold = th;
                sc.seeds.master = static_cast<std::uint64_t>(s);
                sum += sim::run_scenario(sc).summary.mean_non_corrupted_kbits;
            }
            mean[{f, th}] = sum / seeds;
        }
    int interior = 0;
    for (double f : fractions) {
        double best_th = thresholds.front();
        for (double th : thresholds)
            if (mean[{f, th}] > mean[{f, best_th}]) best_th = th;
        bool inner = best_th != thresholds.front() && best_th != thresholds.back();
        interior += inner;
        v.detail << "f=" << f << " argmax " << best_th << "; ";
    }
    v.require(interior >= 3, "interior maximum for fewer than 3 fractions");
    v.detail << "at 0.3:";
    for (std::size_t k = 0; k < fractions.size(); ++k) {
        v.detail << " " << mean[{fractions[k], 0.3}];
        if (k && mean[{fractions[k], 0.3}] > mean[{fractions[k - 1], 0.3}]) v.require(false, "increasing in fraction at 0.3");
    }
    double secs = seconds_since(t0);
    v.detail << "; " << secs << " s";
    v.require(secs < 300.0, "runtime above 5 min");
    return v;
}

// --- 8: variant ordering ---
Verdict c8() {
    Verdict v;
    auto base = load("fig4.ini");
    base.malicious_fraction = 0.3;
    const int seeds = 20;
    const Variant order[] = {Variant::setd2d, Variant::sed2d, Variant::d2d};
    std::vector<std::array<sim::RunSummary, 3>> runs(seeds);
    for (int s = 0; s < seeds; ++s)
        for (int k = 0; k < 3; ++k) {
            auto sc = base;
            sc.variant = order[k];
            sc.seeds.master = static_cast<std::uint64_t>(s + 1);
            runs[s][k] = sim::run_scenario(sc).summary;
        }
    auto test = [&](int better, int worse, bool kbits) {
        int wins = 0, n = 0;
        for (const auto& r : runs) {
            double a = kbits ? r[better].mean_non_corrupted_kbits : -r[better].wasted_pct;
            double b = kbits ? r[worse].mean_non_corrupted_kbits : -r[worse].wasted_pct;
            if (a == b) continue;
            ++n;
            wins += a > b;
        }
        double p = sign_test_p(wins, n);
        v.detail << to_string(order[better]) << (kbits ? " > " : " less waste than ") << to_string(order[worse]) << " " << wins
                 << "/" << n << " p=" << p << "; ";
        v.require(n > 0 && p <= 0.05, std::string(to_string(order[better])) + " vs " + std::string(to_string(order[worse])));
    };
    test(0, 1, true);
    test(1, 2, true);
    test(0, 1, false);
    test(1, 2, false);
    return v;
}

// --- 9: selection vs exhaustive enumeration ---
Verdict c9() {
    Verdict v;
    std::mt19937_64 rng(9009);
    int mismatches = 0;
    for (int trial = 0; trial < 500; ++trial) {
        int n = 2 + static_cast<int>(rng() % 7);
        auto in = oracle::random_instance(rng, n);
        radio::CqiReport report(n);
        std::vector<NodeId> ids;
        for (int i = 0; i < n; ++i) {
            report.set_cellular(node(i), in.cell[i]);
            ids.push_back(node(i));
            for (int j = i + 1; j < n; ++j) report.set_d2d(node(i), node(j), in.d2d[i][j]);
        }
        auto cfg = selection::select_configuration(
            report, ids, [&](NodePair p) { return in.st[index_of(p.receiver)][index_of(p.relay)]; }, in.threshold, {});
        auto best = oracle::exhaustive(in);
        std::vector<int> relay(n, -1);
        for (const auto& p : cfg.pairs) relay[index_of(p.receiver)] = static_cast<int>(index_of(p.relay));
        if (cfg.multicast_cqi != best.c || relay != best.relay || std::fabs(cfg.throughput_kbits - best.thr) > 1e-9) ++mismatches;
    }
    v.detail << mismatches << " mismatches in 500";
    v.require(mismatches == 0, "mismatch");
    return v;
}

// --- 10: security suite ---
Verdict c10() {
    using namespace setd2d::crypto;
    using namespace setd2d::protocol;
    Verdict v;
    v.require(mod_pow(5, 4, 23) == 4 && mod_pow(5, 3, 23) == 10 && mod_pow(10, 4, 23) == 18 && mod_pow(4, 3, 23) == 18,
              "DH toy example");

    for (auto kind : {SuiteKind::toy, SuiteKind::standard}) {
        auto suite = make_suite(kind);
        std::string name(suite->name());
        DeterministicRng rng(10);
        int bad = 0;
        for (int k = 0; k < 1000; ++k) {
            auto key = rng.bytes(CryptoSuite::key_size);
            auto pt = rng.bytes(rng.uniform(0, 512));
            auto back = suite->open(key, suite->seal(key, rng, pt));
            bad += !back || *back != pt;
        }
        v.require(bad == 0, name + " round trip");

        // single-bit tamper of the relayed ciphertext, by the relay and in transit
        SecureCell cell(*suite, 11);
        for (std::uint32_t n = 0; n < 3; ++n) cell.register_ue(node(n));
        int missed = 0;
        for (std::uint32_t f = 1; f <= 1000; ++f) {
            auto md = cell.multicast(f, 64);
            RoundOptions o;
            o.action = RelayAction::tamper_ciphertext;
            auto r = cell.run_relay_round(node(0), node(1), md, o);
            missed += r.gtf != false;
        }
        std::size_t bit = 0;
        cell.set_interceptor([&](Message& m) {
            if (m.kind == MessageKind::EncryptedRelayData) m.payload[(bit / 8) % m.payload.size()] ^= static_cast<std::uint8_t>(1u << (bit % 8));
        });
        for (std::uint32_t f = 1; f <= 1000; ++f, bit += 7) missed += cell.run_relay_round(node(0), node(1), cell.multicast(f, 64)).gtf != false;
        v.require(missed == 0, name + " tamper undetected " + std::to_string(missed) + " times");

        // DH public value substitution at each exchange step
        SecureCell mitm(*suite, 12);
        for (std::uint32_t n = 0; n < 3; ++n) mitm.register_ue(node(n));
        DeterministicRng mallory(13);
        int undetected = 0, trials = 0;
        for (auto target : {MessageKind::D2DInit, MessageKind::PairAnnounce, MessageKind::KeyResponse})
            for (std::uint32_t f = 1; f <= 100; ++f) {
                auto fake = suite->dh_generate(mallory);
                mitm.set_interceptor([&, target](Message& m) {
                    if (m.kind != target) return;
                    auto n = target == MessageKind::PairAnnounce ? 3u : 2u;
                    auto fields = unpack(m.payload, n);
                    if (!fields) return;
                    // in the toy group a random key can equal the honest one; that is no substitution
                    while (fake.public_key == (*fields)[1]) fake = suite->dh_generate(mallory);
                    (*fields)[1] = fake.public_key;
                    m.payload = n == 3 ? pack({(*fields)[0], (*fields)[1], (*fields)[2]}) : pack({(*fields)[0], (*fields)[1]});
                });
                ++trials;
                undetected += mitm.run_relay_round(node(0), node(1), mitm.multicast(f, 32)).outcome != RoundOutcome::mac_failure;
            }
        v.require(undetected == 0, name + " MITM undetected " + std::to_string(undetected) + "/" + std::to_string(trials));
        v.detail << name << ": 1000 round trips, 2000 tamper trials, " << trials << " MITM trials; ";
    }

    // full network transcript, no clear SUPI anywhere
    for (const char* file : {"standard_suite.ini", "mixed_attacks.ini"}) {
        auto sc = load(file);
        sc.transcript = true;
        auto r = sim::run_scenario(sc);
        std::ostringstream os;
        r.transcript.write_jsonl(os);
        const std::string log = os.str();
        int leaks = log.find("imsi") != std::string::npos;
        for (std::uint32_t n = 0; n < sc.n_nodes; ++n) {
            auto supi = make_supi(1000000 + n);
            leaks += log.find(supi) != std::string::npos || log.find(supi.substr(10)) != std::string::npos;
        }
        v.require(!log.empty() && leaks == 0, std::string(file) + " transcript leaks SUPI");
        v.detail << file << " transcript " << log.size() << " bytes, " << leaks << " SUPI hits; ";
    }
    return v;
}

// --- 11: determinism ---
std::string run_bytes(const Scenario& sc) {
    std::ostringstream os;
    if (sc.experiment != Experiment::network) {
        out::write_trace_jsonl(os, sim::run_trace_experiment(sc));
        return os.str();
    }
    auto sc2 = sc;
    sc2.transcript = true;
    auto r = sim::run_scenario(sc2);
    out::write_metrics_csv(os, r.frames);
    out::write_summary_csv(os, r.summary);
    out::write_configurations_jsonl(os, r.frames);
    out::write_st_trace_jsonl(os, r.frames);
    out::write_final_trust_csv(os, r);
    r.transcript.write_jsonl(os);
    return os.str();
}

Verdict c11() {
    Verdict v;
    int checked = 0;
    for (const auto& e : std::filesystem::directory_iterator(SETD2D_CONFIG_DIR)) {
        if (e.path().extension() != ".ini") continue;
        auto sc = config::from_ptree(config::read_ini_file(e.path().string()));
        if (sc.experiment == Experiment::network) sc.frames = std::min<std::uint32_t>(sc.frames, 30);
        auto a = run_bytes(sc), b = run_bytes(sc);
        v.require(a == b, e.path().filename().string() + " differs");
        ++checked;
    }
    v.detail << checked << " configs run twice";
    return v;
}

const std::map<int, std::pair<std::string, std::function<Verdict()>>> criteria{
    {1, {"trust math matches the independent evaluator", c1}},
    {2, {"all-good history: sib 0, st increasing, sort integrity lower", c2}},
    {3, {"decay orderings short vs long interval", c3}},
    {4, {"on-off trace coherence", c4}},
    {5, {"periodic attack: st decreasing in beta2", c5}},
    {6, {"receiver-selective separation", c6}},
    {7, {"threshold sweep interior optimum", c7}},
    {8, {"variant ordering by sign test", c8}},
    {9, {"selection equals exhaustive enumeration", c9}},
    {10, {"security suite", c10}},
    {11, {"determinism", c11}},
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    std::vector<int> which;
    app.add_option("-c,--criterion", which, "criterion numbers (default: all)")->check(CLI::Range(1, 11));
    CLI11_PARSE(app, argc, argv);
    if (which.empty())
        for (const auto& [k, _] : criteria) which.push_back(k);

    int failed = 0;
    for (int k : which) {
        const auto& [title, fn] = criteria.at(k);
        Verdict v;
        try {
            v = fn();
        } catch (const std::exception& e) {
            v.require(false, std::string("exception: ") + e.what());
        }
        failed += !v.pass();
        std::cout << (v.pass() ? "PASS" : "FAIL") << " criterion " << k << ": " << title << " [" << v.detail.str() << "]";
        for (const auto& f : v.failures) std::cout << " failed: " << f << ";";
        std::cout << std::endl;
    }
    return failed ? 1 : 0;
}
