use super::sc::{ScHandles, ScKernel};
use super::{branch_metric, DecodedPath, DecoderConfig, ListOutput, LlrBlock};
use crate::code::Code;

struct Path {
    sc: ScHandles,
    /// Paths with equal `state` hold identical SC storage content.
    state: u32,
    v: Vec<u8>,
    u: Vec<u8>,
    metric: f64,
}

#[derive(Clone, Copy)]
struct Candidate {
    parent: u32,
    vbit: u8,
    u: u8,
    metric: f64,
}

/// Per-stage bookkeeping of a look-ahead decoding run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DecodeTrace {
    pub stages: Vec<StageTrace>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageTrace {
    pub stage: usize,
    /// Paths of the main (`u`) tree after pruning.
    pub main_paths: usize,
    /// Distinct `v` prefixes among the look-ahead paths.
    pub distinct_lookahead: usize,
    /// Last `v` index estimated so far.
    pub lookahead_index: usize,
    /// Every committed `u` bit agrees with the precoder applied to `v`.
    pub consistent: bool,
}

fn record_stage(trace: &mut DecodeTrace, code: &Code, paths: &[Path], i: usize, lookahead: usize) {
    let len = code.block_len();
    let n = code.profile().log_len();
    let last = (i + lookahead).min(len - 1);
    let mut prefixes: Vec<&[u8]> = paths.iter().map(|p| &p.v[..=last]).collect();
    prefixes.sort_unstable();
    prefixes.dedup();
    let consistent = paths.iter().all(|p| {
        p.u.len() == i + 1 && (0..=i).all(|k| p.u[k] == code.precoder().output_bit(&p.v, k, n))
    });
    trace.stages.push(StageTrace {
        stage: i,
        main_paths: paths.len(),
        distinct_lookahead: prefixes.len(),
        lookahead_index: last,
        consistent,
    });
}

/// List decoding with a `lookahead`-stage `v` window.
pub(super) fn run(
    llr: &LlrBlock,
    code: &Code,
    config: &DecoderConfig,
    lookahead: usize,
    mut trace: Option<&mut DecodeTrace>,
) -> ListOutput {
    let len = code.block_len();
    let profile = code.profile();
    let precoder = code.precoder();
    let n = profile.log_len();
    let list_size = config.list_size;

    let mut kernel = ScKernel::new(len, config.check_node);
    let mut paths = vec![Path {
        sc: kernel.new_path(),
        state: 0,
        v: vec![0; len],
        u: Vec::with_capacity(len),
        metric: 0.0,
    }];
    let mut spare: Vec<Vec<u8>> = Vec::new();

    // Enumerate every information value inside the initial window.
    for j in 0..lookahead.min(len) {
        if profile.is_info(j) {
            let mut next = Vec::with_capacity(2 * paths.len());
            for p in paths {
                let mut q = Path {
                    sc: kernel.fork(&p.sc),
                    state: p.state,
                    v: p.v.clone(),
                    u: p.u.clone(),
                    metric: p.metric,
                };
                q.v[j] = 1;
                next.push(p);
                next.push(q);
            }
            paths = next;
        }
    }

    let mut soft = Vec::with_capacity(2 * list_size);
    let mut cands: Vec<Candidate> = Vec::with_capacity(4 * list_size);
    let mut order: Vec<u32> = Vec::with_capacity(4 * list_size);
    let mut survivors: Vec<u8> = Vec::new();
    // Per state: index of the path that computed it this stage.
    let mut computed: Vec<u32> = Vec::new();
    // Per (parent state, u): index of the path that fed it.
    let mut fed: Vec<u32> = Vec::new();
    let mut states = 1usize;

    for i in 0..len {
        let j = i + lookahead;
        let branches = j < len && profile.is_info(j);

        // Look-ahead siblings often share a `u` prefix; compute each state once.
        soft.clear();
        computed.clear();
        computed.resize(states, u32::MAX);
        for pi in 0..paths.len() {
            let st = paths[pi].state as usize;
            let rep = computed[st];
            if rep == u32::MAX {
                computed[st] = pi as u32;
                let lam = kernel.bit_llr(&mut paths[pi].sc, llr, i);
                soft.push(lam);
            } else {
                let shared = kernel.fork(&paths[rep as usize].sc);
                kernel.drop_path(&paths[pi].sc);
                paths[pi].sc = shared;
                soft.push(soft[rep as usize]);
            }
        }

        cands.clear();
        for (pi, p) in paths.iter_mut().enumerate() {
            let lam = soft[pi];
            if branches {
                for b in 0..2u8 {
                    p.v[j] = b;
                    let u = precoder.output_bit(&p.v, i, n);
                    cands.push(Candidate {
                        parent: pi as u32,
                        vbit: b,
                        u,
                        metric: p.metric + branch_metric(u, lam, config.metric),
                    });
                }
                p.v[j] = 0;
            } else {
                let u = precoder.output_bit(&p.v, i, n);
                cands.push(Candidate {
                    parent: pi as u32,
                    vbit: 0,
                    u,
                    metric: p.metric + branch_metric(u, lam, config.metric),
                });
            }
        }

        order.clear();
        order.extend(0..cands.len() as u32);
        if cands.len() > list_size {
            let key = |&a: &u32, &b: &u32| {
                cands[a as usize]
                    .metric
                    .total_cmp(&cands[b as usize].metric)
                    .then(a.cmp(&b))
            };
            order.select_nth_unstable_by(list_size - 1, key);
            order.truncate(list_size);
            order.sort_unstable();
        }

        survivors.clear();
        survivors.resize(paths.len(), 0);
        for &c in &order {
            survivors[cands[c as usize].parent as usize] += 1;
        }
        fed.clear();
        fed.resize(2 * states, u32::MAX);
        let mut next_states = 0u32;
        let mut old: Vec<Option<Path>> = paths.drain(..).map(Some).collect();
        for (pi, slot) in old.iter_mut().enumerate() {
            if survivors[pi] == 0 {
                let p = slot.take().expect("live parent");
                kernel.drop_path(&p.sc);
                spare.push(p.v);
                spare.push(p.u);
            }
        }
        for &c in &order {
            let cand = cands[c as usize];
            let pi = cand.parent as usize;
            let mut path = if survivors[pi] > 1 {
                survivors[pi] -= 1;
                let parent = old[pi].as_ref().expect("live parent");
                let mut v = spare.pop().unwrap_or_default();
                v.clone_from(&parent.v);
                let mut u = spare.pop().unwrap_or_default();
                u.clone_from(&parent.u);
                Path {
                    sc: kernel.fork(&parent.sc),
                    state: parent.state,
                    v,
                    u,
                    metric: parent.metric,
                }
            } else {
                old[pi].take().expect("live parent")
            };
            if branches {
                path.v[j] = cand.vbit;
            }
            path.u.push(cand.u);
            path.metric = cand.metric;
            let key = 2 * path.state as usize + cand.u as usize;
            match fed[key] {
                u32::MAX => {
                    kernel.feed_bit(&mut path.sc, i, cand.u);
                    fed[key] = paths.len() as u32;
                    path.state = next_states;
                    next_states += 1;
                }
                twin => {
                    let twin = &paths[twin as usize];
                    let shared = kernel.fork(&twin.sc);
                    kernel.drop_path(&path.sc);
                    path.sc = shared;
                    path.state = twin.state;
                }
            }
            paths.push(path);
        }

        states = next_states as usize;

        if let Some(t) = trace.as_deref_mut() {
            record_stage(t, code, &paths, i, lookahead);
        }
    }

    let mut ranked: Vec<(usize, Path)> = paths.into_iter().enumerate().collect();
    ranked.sort_by(|a, b| a.1.metric.total_cmp(&b.1.metric).then(a.0.cmp(&b.0)));
    let mut out: Vec<DecodedPath> = ranked
        .into_iter()
        .map(|(_, p)| finish(code, p.v, p.u, p.metric))
        .collect();
    if code.crc().is_some() {
        if let Some(k) = out.iter().position(|p| p.crc_ok == Some(true)) {
            let best = out.remove(k);
            out.insert(0, best);
        }
    }
    ListOutput {
        paths: out,
        node_visits: kernel.visits,
    }
}

fn finish(code: &Code, v: Vec<u8>, u: Vec<u8>, metric: f64) -> DecodedPath {
    let crc_ok = code.crc().map(|c| {
        let data: Vec<u8> = code.profile().info_set().iter().map(|&i| v[i]).collect();
        c.remainder(&data) == 0
    });
    DecodedPath {
        message: code.message_from_v(&v),
        v,
        u,
        metric,
        crc_ok,
    }
}

/// Single-path hard-decision SC for polar and forward-precoded codes.
pub(super) fn sc(llr: &LlrBlock, code: &Code, config: &DecoderConfig) -> DecodedPath {
    let len = code.block_len();
    let profile = code.profile();
    let precoder = code.precoder();
    let n = profile.log_len();
    let mut kernel = ScKernel::new(len, config.check_node);
    let mut handles = kernel.new_path();
    let mut v = vec![0u8; len];
    let mut u = Vec::with_capacity(len);
    let mut metric = 0.0;
    for i in 0..len {
        let lam = kernel.bit_llr(&mut handles, llr, i);
        if profile.is_info(i) {
            // p_0 = 1, so u_i = (contribution of earlier v) xor v_i.
            let carry = precoder.output_bit(&v, i, n);
            let hard = (lam < 0.0) as u8;
            v[i] = if lam == 0.0 { 0 } else { hard ^ carry };
        }
        let ui = precoder.output_bit(&v, i, n);
        metric += branch_metric(ui, lam, config.metric);
        u.push(ui);
        kernel.feed_bit(&mut handles, i, ui);
    }
    finish(code, v, u, metric)
}
