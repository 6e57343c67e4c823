//! C interface to `pco_core`.
//!
//! Topologies are opaque handles created with [`pco_topology_new`] and
//! released with [`pco_topology_free`]. Every fallible call returns one of
//! the `PCO_*` status codes; on failure a description is available through
//! [`pco_last_error`] on the same thread. Output parameters are written only
//! when the call returns [`PCO_OK`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use pco_core::ratio::q;
use pco_core::sched::{init_schedule, InitMode, SchedConfig, SchedEngine, SchedError};
use pco_core::spectral::{analyse, build_clique_system, lambda2_approx, SpectralError};
use pco_core::sync::{init_sync, InitPhases, SyncConfig, SyncEngine, SyncError};
use pco_core::topology::{maximal_cliques, TopologyError};
use pco_core::{CliqueCover, Topology};

pub const PCO_OK: i32 = 0;
pub const PCO_ERR_NULL: i32 = 1;
pub const PCO_ERR_INVALID_ARGUMENT: i32 = 2;
pub const PCO_ERR_TOPOLOGY: i32 = 3;
pub const PCO_ERR_SYNC: i32 = 4;
pub const PCO_ERR_SCHED: i32 = 5;
pub const PCO_ERR_SPECTRAL: i32 = 6;
pub const PCO_ERR_BUFFER_TOO_SMALL: i32 = 7;
pub const PCO_ERR_PANIC: i32 = 8;

/// Opaque network handle.
pub struct PcoTopology {
    topo: Topology,
    cover: CliqueCover,
}

/// Exact rational `num / den` with `den > 0`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PcoRatio {
    pub num: i64,
    pub den: i64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct PcoSyncResult {
    pub converged: bool,
    pub time: f64,
    pub periods: f64,
    pub delta_max: f64,
    /// Head node id, or -1 when the final state has none.
    pub head: i64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct PcoSchedResult {
    pub converged: bool,
    pub frames: u64,
    pub order_preserved: bool,
    pub max_sum_error: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Fail(i32, String);

impl From<TopologyError> for Fail {
    fn from(e: TopologyError) -> Self {
        Fail(PCO_ERR_TOPOLOGY, e.to_string())
    }
}

impl From<SyncError> for Fail {
    fn from(e: SyncError) -> Self {
        Fail(PCO_ERR_SYNC, e.to_string())
    }
}

impl From<SchedError> for Fail {
    fn from(e: SchedError) -> Self {
        Fail(PCO_ERR_SCHED, e.to_string())
    }
}

impl From<SpectralError> for Fail {
    fn from(e: SpectralError) -> Self {
        Fail(PCO_ERR_SPECTRAL, e.to_string())
    }
}

fn set_error(msg: &str) {
    let text = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            PCO_OK
        }
        Ok(Err(Fail(code, msg))) => {
            set_error(&msg);
            code
        }
        Err(_) => {
            set_error("internal panic");
            PCO_ERR_PANIC
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(PCO_ERR_NULL, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> Fail {
    Fail(PCO_ERR_INVALID_ARGUMENT, msg.into())
}

unsafe fn input<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        Ok(&[])
    } else if p.is_null() {
        Err(null(what))
    } else {
        Ok(slice::from_raw_parts(p, len))
    }
}

unsafe fn handle<'a>(p: *const PcoTopology) -> Result<&'a PcoTopology, Fail> {
    p.as_ref().ok_or_else(|| null("topology"))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

fn ratio(r: PcoRatio, what: &str) -> Result<pco_core::Q, Fail> {
    if r.den <= 0 {
        return Err(invalid(format!("{what} has a non-positive denominator")));
    }
    Ok(q(r.num as i128, r.den as i128))
}

/// Copies the message of the last failed call on this thread into `buf`
/// (NUL-terminated, truncated to `len`). Returns the full message length
/// excluding the terminator, so a return value `>= len` means truncation.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn pco_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let bytes = e.borrow();
        let bytes = bytes.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Builds a network from `edge_count` undirected edges `(src[k], dst[k])`
/// with delays `tau[k]`; `tau` may be null for zero delays.
///
/// # Safety
/// `src` and `dst` must hold `edge_count` entries, `tau` likewise unless
/// null, and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pco_topology_new(
    node_count: usize,
    src: *const usize,
    dst: *const usize,
    tau: *const f64,
    edge_count: usize,
    out: *mut *mut PcoTopology,
) -> i32 {
    guard(|| {
        let src = input(src, edge_count, "src")?;
        let dst = input(dst, edge_count, "dst")?;
        let tau = if tau.is_null() { None } else { Some(input(tau, edge_count, "tau")?) };
        let triples: Vec<_> = (0..edge_count)
            .map(|k| (src[k], dst[k], tau.map_or(0.0, |t| t[k])))
            .collect();
        let topo = Topology::from_triples(node_count, &triples)?;
        let cover = maximal_cliques(&topo)?;
        let boxed = Box::into_raw(Box::new(PcoTopology { topo, cover }));
        if out.is_null() {
            drop(Box::from_raw(boxed));
            return Err(null("out"));
        }
        out.write(boxed);
        Ok(())
    })
}

/// Releases a handle from [`pco_topology_new`]. Null is ignored.
///
/// # Safety
/// `topo` must be null or a live handle not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pco_topology_free(topo: *mut PcoTopology) {
    if !topo.is_null() {
        drop(Box::from_raw(topo));
    }
}

/// # Safety
/// `topo` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pco_topology_node_count(topo: *const PcoTopology, out: *mut usize) -> i32 {
    guard(|| write(out, handle(topo)?.topo.node_count(), "out"))
}

/// Number of maximal cliques.
///
/// # Safety
/// `topo` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pco_topology_clique_count(topo: *const PcoTopology, out: *mut usize) -> i32 {
    guard(|| write(out, handle(topo)?.cover.len(), "out"))
}

/// Shortest-path delay between two nodes.
///
/// # Safety
/// `topo` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pco_topology_path_delay(topo: *const PcoTopology, i: usize, j: usize, out: *mut f64) -> i32 {
    guard(|| {
        let t = &handle(topo)?.topo;
        let n = t.node_count();
        if i >= n || j >= n {
            return Err(invalid(format!("node out of range for {n} nodes")));
        }
        write(out, t.path_delay(i, j), "out")
    })
}

/// Runs synchronization until a fixed point or `max_periods`.
///
/// Initial phases come from `phases` (length = node count) when non-null,
/// otherwise from `seed`. A NaN `rho` selects the default refractory
/// period. When `final_phases` is non-null it receives the end state and
/// must hold `len` entries, at least the node count.
///
/// # Safety
/// Pointers must be null or valid for the lengths described above; `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn pco_sync_run(
    topo: *const PcoTopology,
    alpha: f64,
    rho: f64,
    max_periods: f64,
    seed: u64,
    phases: *const f64,
    out: *mut PcoSyncResult,
    final_phases: *mut f64,
    len: usize,
) -> i32 {
    guard(|| {
        let t = &handle(topo)?.topo;
        let n = t.node_count();
        if out.is_null() {
            return Err(null("out"));
        }
        if !final_phases.is_null() && len < n {
            return Err(Fail(PCO_ERR_BUFFER_TOO_SMALL, format!("final_phases needs {n} entries")));
        }
        let cfg = SyncConfig {
            rho: (!rho.is_nan()).then_some(rho),
            max_periods,
            ..SyncConfig::with_alpha(alpha)
        };
        let init = if phases.is_null() {
            InitPhases::Seed(seed)
        } else {
            InitPhases::Explicit(input(phases, n, "phases")?.to_vec())
        };
        let mut state = init_sync(t, &cfg, init)?;
        let run = SyncEngine::new(t, &cfg)?.run_until_fixed(&mut state)?;
        if !final_phases.is_null() {
            slice::from_raw_parts_mut(final_phases, n).copy_from_slice(&run.phases);
        }
        out.write(PcoSyncResult {
            converged: run.converged,
            time: run.time,
            periods: run.periods,
            delta_max: run.delta_max,
            head: run.head.map_or(-1, |h| h as i64),
        });
        Ok(())
    })
}

/// Runs the scheduling protocol from a seeded collision-free random start
/// until the timers settle or `max_frames` elapse. `demands` holds one
/// ratio per node. When `gamma` is non-null it receives the final slot
/// width of every node and must hold `len` entries, at least the node
/// count.
///
/// # Safety
/// Pointers must be null or valid for the lengths described above; `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn pco_sched_run(
    topo: *const PcoTopology,
    beta: f64,
    delta: PcoRatio,
    demands: *const PcoRatio,
    max_frames: u64,
    seed: u64,
    out: *mut PcoSchedResult,
    gamma: *mut f64,
    len: usize,
) -> i32 {
    guard(|| {
        let h = handle(topo)?;
        let n = h.topo.node_count();
        if out.is_null() {
            return Err(null("out"));
        }
        if !gamma.is_null() && len < n {
            return Err(Fail(PCO_ERR_BUFFER_TOO_SMALL, format!("gamma needs {n} entries")));
        }
        let d = input(demands, n, "demands")?
            .iter()
            .map(|&r| ratio(r, "demand"))
            .collect::<Result<Vec<_>, _>>()?;
        let mut cfg = SchedConfig::new(beta, ratio(delta, "delta")?, d);
        cfg.max_frames = max_frames;
        let engine = SchedEngine::new(&h.topo, &h.cover, &cfg)?;
        let mut state = init_schedule(&h.cover, &cfg, &InitMode::RandomPartition, seed)?;
        let run = engine.run_frames(&mut state)?;
        if !gamma.is_null() {
            slice::from_raw_parts_mut(gamma, n).copy_from_slice(&run.gamma);
        }
        out.write(PcoSchedResult {
            converged: run.converged,
            frames: run.frames,
            order_preserved: run.order_preserved,
            max_sum_error: run.max_sum_error,
        });
        Ok(())
    })
}

/// Second-largest eigenvalue modulus of the per-frame map of one clique of
/// `n` nodes with equal demand `d`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pco_lambda2_exact(n: usize, beta: f64, d: f64, delta: f64, out: *mut f64) -> i32 {
    guard(|| {
        if n < 2 {
            return Err(invalid("a clique needs at least two nodes"));
        }
        let report = analyse(&build_clique_system(&vec![d; n], delta, beta)?)?;
        write(out, report.lambda2_exact, "out")
    })
}

/// Closed-form estimate of [`pco_lambda2_exact`].
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pco_lambda2_approx(n: usize, beta: f64, d: f64, delta: f64, out: *mut f64) -> i32 {
    guard(|| {
        if n < 2 || !(beta > 0.0 && beta < 1.0) || !(d > 0.0) || !(delta >= 0.0) {
            return Err(invalid("need n >= 2, 0 < beta < 1, d > 0 and delta >= 0"));
        }
        write(out, lambda2_approx(n, beta, d, delta), "out")
    })
}
