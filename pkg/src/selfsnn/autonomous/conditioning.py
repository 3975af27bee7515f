"""Cerebellar delay-conditioning circuit.

Populations::

    PN  (one group per conditioned stimulus)  --N-->  IPN  --> conditioned response
    GC  (one group per conditioned stimulus)  --C-->  PU   --| IPN
    IO  (US relay, climbing fibres)           ......> teaching signal for N and C
    IPN --| IO  (nucleo-olivary feedback, delayed)
    IO  --> IPN (hard-wired reflex path: the unconditioned response)

PN and GC are Poisson relays that fire while their stimulus is on; PU, IPN
and IO are spiking.  The IO rate is ``r0 + r_us * US - k * IPN`` (rectified),
so the teaching signal ``delta = IO spikes - baseline`` is positive when the
US arrives unpredicted, near zero once the IPN anticipates it, and negative
when a predicted US is omitted.  Both plastic projections learn from the same
delta: GC->PU depresses (disinhibiting the IPN) and PN->IPN potentiates.

The cortical (GC->PU) change is fast and labile: it relaxes back toward its
naive value a little after every trial and further during rest.  The nuclear
(PN->IPN) change is slow and retained.  Savings and spontaneous recovery come
from that split.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..core.neuron import NeuronParams, lif_update
from ..rng import as_generator


@dataclass(frozen=True)
class ConditioningConfig:
    dt: float = 1.0
    pn_per_cs: int = 10
    gc_per_cs: int = 20
    n_pu: int = 10
    n_ipn: int = 10
    n_io: int = 20
    cs_rate: float = 100.0        # Hz, PN and GC while the CS is on
    tau_syn: float = 10.0         # ms, synaptic current filter
    pu_bias: float = 1.6
    ipn_bias: float = 0.9
    ipn_noise: float = 0.5        # std of current noise per step
    pu_to_ipn: float = 3.0        # inhibition per unit of PU synaptic trace
    io_to_ipn: float = 4.0        # reflex path
    io_rate: float = 40.0         # Hz, baseline
    us_rate: float = 250.0        # Hz, added while the US is on
    us_duration: float = 20.0     # ms
    olive_inhibition: float = 3.5  # Hz of IO rate removed per Hz of IPN rate
    olive_delay: float = 20.0     # ms
    c_naive: float = 0.01
    c_min: float = -0.05
    c_max: float = 0.06
    n_max: float = 0.25
    lr_cortex_ltd: float = 6e-5   # per (GC trace x teaching spike), US-driven
    lr_cortex_ltp: float = 1.5e-4  # same, US omitted
    lr_nucleus: float = 2e-5
    nucleus_depression: float = 0.25  # relative rate of PN->IPN depression
    consolidation: float = 0.05       # per trial, labile -> stable cortical change
    tau_rest: float = 60.0            # minutes of rest for cortical relaxation
    cr_window: float = 150.0      # ms before US onset scored as the CR
    cr_reference_rate: float = 40.0  # Hz per IPN neuron that counts as a full CR
    post_us: float = 30.0         # ms simulated after the US window


@dataclass
class TrialResult:
    cr: float
    ipn_count: int
    pu_count: int
    ur_count: int
    teaching: float
    ipn_per_step: np.ndarray | None = None  # population spike count per step, when recorded


@dataclass
class ConditioningCircuit:
    """Stateful circuit; one instance per simulated animal."""

    stimuli: tuple[str, ...] = ("A", "B", "C", "X")
    cfg: ConditioningConfig = field(default_factory=ConditioningConfig)
    seed: int = 0

    def __post_init__(self):
        cfg = self.cfg
        if len(set(self.stimuli)) != len(self.stimuli) or not self.stimuli:
            raise ValueError("stimulus names must be unique and non-empty")
        self._rng = as_generator(self.seed, "conditioning")
        k = len(self.stimuli)
        self.nucleus = np.zeros((k * cfg.pn_per_cs, cfg.n_ipn))             # PN -> IPN
        # GC -> PU as naive + consolidated + labile deviations
        self.cortex_stable = np.zeros((k * cfg.gc_per_cs, cfg.n_pu))
        self.cortex_labile = np.zeros((k * cfg.gc_per_cs, cfg.n_pu))
        self.params = NeuronParams()
        self.trials_run = 0

    @property
    def cortex(self) -> np.ndarray:
        cfg = self.cfg
        return np.clip(cfg.c_naive + self.cortex_stable + self.cortex_labile, cfg.c_min, cfg.c_max)

    def reseed(self, rng) -> None:
        self._rng = as_generator(rng, "conditioning")

    # ------------------------------------------------------------------
    def _groups(self, cs) -> list[int]:
        if cs is None or cs is False:
            return []
        if cs is True:
            return [0]
        names = [cs] if isinstance(cs, str) else list(cs)
        idx = []
        for name in names:
            if name not in self.stimuli:
                raise ValueError(f"unknown stimulus {name!r}; known: {list(self.stimuli)}")
            idx.append(self.stimuli.index(name))
        return idx

    def trial(self, cs=True, us: bool = True, interval: float = 200.0, learn: bool = True,
              record: bool = False) -> TrialResult:
        """Run one trial: CS from 0 to the end of the US window, US at ``interval`` ms.

        ``cs`` is ``True`` (first stimulus), ``False``/``None`` or stimulus name(s)
        for compounds.  The CR is the IPN response in the window before US onset.
        """
        cfg = self.cfg
        if not math.isfinite(interval) or interval < 0:
            raise ValueError("interval must be a finite value >= 0")
        dt = cfg.dt
        groups = self._groups(cs)
        us_on = int(round(interval / dt))
        us_off = us_on + int(round(cfg.us_duration / dt))
        steps = us_off + int(round(cfg.post_us / dt))
        cr_from = max(0, us_on - int(round(cfg.cr_window / dt)))
        rng = self._rng

        k = len(self.stimuli)
        p_cs = cfg.cs_rate * dt / 1000.0
        pn_mask = np.zeros(k * cfg.pn_per_cs, dtype=bool)
        gc_mask = np.zeros(k * cfg.gc_per_cs, dtype=bool)
        for g in groups:
            pn_mask[g * cfg.pn_per_cs:(g + 1) * cfg.pn_per_cs] = True
            gc_mask[g * cfg.gc_per_cs:(g + 1) * cfg.gc_per_cs] = True
        cs_steps = us_off if groups else 0
        pn_spk = (rng.random((cs_steps, pn_mask.sum())) < p_cs)
        gc_spk = (rng.random((cs_steps, gc_mask.sum())) < p_cs)
        io_u = rng.random((steps, cfg.n_io))
        ipn_noise = rng.normal(0.0, cfg.ipn_noise, (steps, cfg.n_ipn))
        pn_on = np.flatnonzero(pn_mask)
        gc_on = np.flatnonzero(gc_mask)
        n_act = self.nucleus[pn_on]
        c_act = self.cortex[gc_on]

        decay = math.exp(-dt / cfg.tau_syn)
        s_pn = np.zeros(pn_on.size)
        s_gc = np.zeros(gc_on.size)
        s_pu = 0.0
        s_io = 0.0
        s_ipn = 0.0
        v_pu = np.zeros(cfg.n_pu); r_pu = np.zeros(cfg.n_pu)
        v_ipn = np.zeros(cfg.n_ipn); r_ipn = np.zeros(cfg.n_ipn)
        # warm start PU at its tonic level so the first steps are not transient
        s_pu = self._tonic_pu_trace()
        delay = int(round(cfg.olive_delay / dt))
        ipn_hist = np.zeros(steps + delay)
        ipn_count = pu_count = ur_count = 0
        elig_pn = np.zeros(pn_on.size)
        elig_gc = np.zeros(gc_on.size)
        teaching = 0.0
        ipn_steps = np.zeros(steps, dtype=int) if record else None
        base_io = cfg.io_rate * dt / 1000.0
        io_floor = 2.0 * cfg.io_rate * cfg.tau_syn / 1000.0

        for t in range(steps):
            if t < cs_steps:
                s_pn = s_pn * decay + pn_spk[t]
                s_gc = s_gc * decay + gc_spk[t]
            else:
                s_pn = s_pn * decay
                s_gc = s_gc * decay
            i_pu = cfg.pu_bias + s_gc @ c_act if gc_on.size else np.full(cfg.n_pu, cfg.pu_bias)
            v_pu, r_pu, sp_pu = lif_update(v_pu, r_pu, self.params, i_pu, dt)
            # reflex collaterals respond to olive bursts above the baseline rate
            burst = max(0.0, s_io - io_floor)
            i_ipn = cfg.ipn_bias - cfg.pu_to_ipn * s_pu + cfg.io_to_ipn * burst + ipn_noise[t]
            if pn_on.size:
                i_ipn = i_ipn + s_pn @ n_act
            v_ipn, r_ipn, sp_ipn = lif_update(v_ipn, r_ipn, self.params, i_ipn, dt)
            n_pu_spk = int(sp_pu.sum())
            n_ipn_spk = int(sp_ipn.sum())
            if record:
                ipn_steps[t] = n_ipn_spk
            s_pu = s_pu * decay + n_pu_spk / cfg.n_pu
            s_ipn = s_ipn * decay + n_ipn_spk / cfg.n_ipn
            ipn_hist[t + delay] = s_ipn
            # IO rate from the US and delayed, smoothed nucleo-olivary inhibition
            ipn_rate = ipn_hist[t] * 1000.0 / cfg.tau_syn  # Hz per IPN neuron
            us_now = us and us_on <= t < us_off
            rate = cfg.io_rate + (cfg.us_rate if us_now else 0.0) - cfg.olive_inhibition * ipn_rate
            p_io = max(0.0, rate) * dt / 1000.0
            io_spk = int((io_u[t] < p_io).sum())
            s_io = s_io * decay + io_spk / cfg.n_io
            if cr_from <= t < us_on:
                ipn_count += n_ipn_spk
                pu_count += n_pu_spk
            if us_on <= t < us_off:
                delta = io_spk - cfg.n_io * base_io
                teaching += delta
                elig_pn += s_pn * delta
                elig_gc += s_gc * delta
            if t >= us_on and us:
                ur_count += n_ipn_spk

        ref = cfg.cr_reference_rate * cfg.n_ipn * (us_on - cr_from) * dt / 1000.0
        cr = min(1.0, ipn_count / ref) if ref > 0 else 0.0
        if learn:
            self._learn(pn_on, gc_on, elig_pn, elig_gc, us)
        self.trials_run += 1
        return TrialResult(cr=float(cr), ipn_count=ipn_count, pu_count=pu_count,
                           ur_count=ur_count, teaching=float(teaching), ipn_per_step=ipn_steps)

    def _tonic_pu_trace(self) -> float:
        cfg = self.cfg
        p = self.params
        i = cfg.pu_bias
        if i <= p.v_threshold:
            return 0.0
        isi = p.t_refractory + p.tau_m * math.log(i / (i - p.v_threshold))
        return cfg.tau_syn / isi

    def _learn(self, pn_on, gc_on, elig_pn, elig_gc, us: bool) -> None:
        cfg = self.cfg
        if gc_on.size:
            # climbing-fibre bursts (US trials) and their absence use separate rates;
            # choosing by trial type keeps zero-mean olive noise from drifting weights
            lr = cfg.lr_cortex_ltd if us else cfg.lr_cortex_ltp
            self.cortex_labile[gc_on] -= (lr * elig_gc)[:, None]
            total = np.clip(cfg.c_naive + self.cortex_stable + self.cortex_labile, cfg.c_min, cfg.c_max)
            self.cortex_labile = total - cfg.c_naive - self.cortex_stable
        moved = cfg.consolidation * self.cortex_labile
        self.cortex_stable += moved
        self.cortex_labile -= moved
        if pn_on.size:
            lr = cfg.lr_nucleus if us else cfg.lr_nucleus * cfg.nucleus_depression
            self.nucleus[pn_on] += (lr * elig_pn)[:, None]
            np.clip(self.nucleus, 0.0, cfg.n_max, out=self.nucleus)

    def rest(self, minutes: float) -> None:
        """Time away from training: unconsolidated cortical changes fade."""
        if minutes < 0:
            raise ValueError("rest duration must be >= 0")
        self.cortex_labile *= math.exp(-minutes / self.cfg.tau_rest)

    def snapshot(self) -> dict:
        return {"nucleus": self.nucleus.copy(), "cortex": self.cortex}


def conditioning_trial(circuit: ConditioningCircuit, cs: bool = True, us: bool = True,
                       interval: float = 200.0) -> float:
    """Run one learning trial and return its CR strength in [0, 1]."""
    return circuit.trial(cs, us, interval, learn=True).cr
