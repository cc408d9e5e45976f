"""Run configuration: a flat key-value file with dotted section names.

The file format is deliberately dumb: one `section.key = value` per line,
`#` comments, sections mirroring module names (protocol, mode_dynamics,
collapse, cli_io).  CLI flags override file values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

from .collapse import DEFAULT_MASK_THEORY, GridSpec
from .protocol import Evolution, QuenchProtocol, Variant

__all__ = ["RunConfig", "load_config_file", "parse_bool"]

# default tau_q sweep for the large-N continuous reproduction; the source
# figure leaves its quench times unstated
DEFAULT_TAU_SWEEP = [8.0, 16.0, 24.0, 32.0, 48.0, 64.0]


def parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def load_config_file(path) -> Dict[str, str]:
    """Parse `section.key = value` lines into a flat dict."""
    out: Dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'section.key = value'")
        key, value = line.split("=", 1)
        key = key.strip()
        if "." not in key:
            raise ValueError(f"{path}:{lineno}: key {key!r} missing section prefix")
        out[key] = value.strip()
    return out


@dataclass
class RunConfig:
    """Everything one pipeline invocation needs."""

    tau_sweep: List[float] = field(default_factory=lambda: list(DEFAULT_TAU_SWEEP))
    variant: Variant = Variant.TO_CRITICAL_POINT
    evolution: Evolution = Evolution.CONTINUOUS
    dt: Optional[float] = None
    steps: Optional[List[int]] = None
    n_sites: int = 120
    lam: float = 0.0
    rtol: float = 1e-10
    atol: float = 1e-12
    grid: GridSpec = field(default_factory=GridSpec)
    mask_threshold: float = DEFAULT_MASK_THEORY
    x_max: Optional[int] = None
    shots: Optional[int] = None
    out_dir: Path = Path("runs")

    def protocols(self) -> List[QuenchProtocol]:
        """One protocol per sweep entry (tau_q values or Trotter step counts)."""
        if self.evolution is Evolution.TROTTER:
            if self.dt is None or not self.steps:
                raise ValueError("Trotter config requires dt and a steps list")
            out = []
            for steps in self.steps:
                duration = steps * self.dt
                tau_q = duration if self.variant is Variant.TO_CRITICAL_POINT \
                    else duration / 2.0
                out.append(QuenchProtocol(tau_q=tau_q, variant=self.variant,
                                          evolution=Evolution.TROTTER,
                                          dt=self.dt, steps=steps))
            return out
        if not self.tau_sweep:
            raise ValueError("empty tau_q sweep")
        return [QuenchProtocol(tau_q=t, variant=self.variant) for t in self.tau_sweep]

    def apply_file(self, values: Dict[str, str]) -> "RunConfig":
        """Fold parsed file values into this config (file < CLI precedence:
        call before applying CLI flags)."""
        for key, val in values.items():
            section, name = key.split(".", 1)
            if section == "protocol":
                if name == "tau_sweep":
                    self.tau_sweep = [float(x) for x in val.split(",")]
                elif name == "variant":
                    self.variant = Variant(val)
                elif name == "evolution":
                    self.evolution = Evolution(val)
                elif name == "dt":
                    self.dt = float(val)
                elif name == "steps":
                    self.steps = _parse_steps(val)
                else:
                    raise ValueError(f"unknown protocol key {name!r}")
            elif section == "mode_dynamics":
                if name == "n_sites":
                    self.n_sites = int(val)
                elif name == "lambda":
                    self.lam = float(val)
                elif name == "rtol":
                    self.rtol = float(val)
                elif name == "atol":
                    self.atol = float(val)
                else:
                    raise ValueError(f"unknown mode_dynamics key {name!r}")
            elif section == "collapse":
                if name == "mask":
                    self.mask_threshold = float(val)
                elif name == "x_max":
                    self.x_max = int(val)
                elif name in ("a_min", "a_max", "b_min", "b_max", "spacing"):
                    self.grid = GridSpec(**{**self.grid.__dict__, name: float(val)})
                else:
                    raise ValueError(f"unknown collapse key {name!r}")
            elif section == "cli_io":
                if name == "out_dir":
                    self.out_dir = Path(val)
                elif name == "shots":
                    self.shots = int(val)
                else:
                    raise ValueError(f"unknown cli_io key {name!r}")
            else:
                raise ValueError(f"unknown config section {section!r}")
        return self


def _parse_steps(text: str) -> List[int]:
    """Step counts: comma list and/or a..b ranges ('8..32' is inclusive)."""
    out: List[int] = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out
