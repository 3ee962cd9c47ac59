"""Fuzzy efficiency controller: per-unit scaling, fuzzification over
normalized universes, min-AND rule inference, and height defuzzification.

The controller turns a measured dc-link power change and the previous
excitation step into the next excitation-current decrement. Operating-point
dependent gains (an affine power base P_b and an affine current base I_b)
normalize both sides so a single rule base serves every torque and speed
condition: equal per-unit inputs produce equal per-unit outputs.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigError, InferenceError
from .machine import MachineParams

POWER_LABELS = ("NB", "NM", "NS", "ZE", "PS", "PM", "PB")
LAST_ACTION_LABELS = ("N", "P")


@dataclass(frozen=True)
class MembershipFunction:
    """Triangular membership on the normalized [-1, 1] axis.

    A foot equal to the center marks a shoulder: the degree saturates at 1 on
    that side instead of falling back to 0.
    """

    label: str
    left_foot: float
    center: float
    right_foot: float

    def __post_init__(self) -> None:
        if not self.left_foot <= self.center <= self.right_foot:
            raise ValueError(
                f"set {self.label}: feet must satisfy left <= center <= right"
            )

    def degree(self, x: float) -> float:
        if x == self.center:
            return 1.0
        if x < self.center:
            if self.left_foot == self.center:
                return 1.0
            if x <= self.left_foot:
                return 0.0
            return (x - self.left_foot) / (self.center - self.left_foot)
        if self.right_foot == self.center:
            return 1.0
        if x >= self.right_foot:
            return 0.0
        return (self.right_foot - x) / (self.right_foot - self.center)


@dataclass(frozen=True)
class FuzzyRule:
    """IF power-change is `power` AND last action is `last_action`
    THEN excitation increment is `output`."""

    power: str
    last_action: str
    output: str


@dataclass(frozen=True)
class FuzzyRuleBase:
    """Linguistic variables and the 14-entry rule table.

    Validated for totality (every power x last-action pair appears exactly
    once), universe coverage of the power-change partition, and a nonempty
    small overlap of the two last-action sets around zero so the height
    defuzzifier can never see an all-zero firing vector.
    """

    power_change_sets: tuple[MembershipFunction, ...]
    last_action_sets: tuple[MembershipFunction, ...]
    output_sets: tuple[MembershipFunction, ...]
    rules: tuple[FuzzyRule, ...]

    def __post_init__(self) -> None:
        power_labels = [s.label for s in self.power_change_sets]
        last_labels = [s.label for s in self.last_action_sets]
        output_labels = [s.label for s in self.output_sets]
        for name, labels in (
            ("power_change", power_labels),
            ("last_action", last_labels),
            ("output", output_labels),
        ):
            if len(set(labels)) != len(labels):
                raise ValueError(f"{name} labels must be unique")
        if len(last_labels) != 2:
            raise ValueError("last_action needs exactly two sets")

        seen: set[tuple[str, str]] = set()
        for rule in self.rules:
            if rule.power not in power_labels:
                raise ValueError(f"rule references unknown power label {rule.power!r}")
            if rule.last_action not in last_labels:
                raise ValueError(
                    f"rule references unknown last-action label {rule.last_action!r}"
                )
            if rule.output not in output_labels:
                raise ValueError(f"rule references unknown output label {rule.output!r}")
            key = (rule.power, rule.last_action)
            if key in seen:
                raise ValueError(f"duplicate rule for antecedent {key}")
            seen.add(key)
        missing = [
            (p, l) for p in power_labels for l in last_labels if (p, l) not in seen
        ]
        if missing:
            raise ValueError(f"rule table not total, missing antecedents: {missing}")

        # Every point of [-1, 1] must fire at least one power-change set.
        for i in range(201):
            x = -1.0 + i / 100.0
            if not any(s.degree(x) > 0.0 for s in self.power_change_sets):
                raise ValueError(f"power_change sets leave {x:.2f} uncovered")

        neg = min(self.last_action_sets, key=lambda s: s.center)
        pos = max(self.last_action_sets, key=lambda s: s.center)
        if not (neg.center < 0.0 < pos.center):
            raise ValueError("last_action centers must straddle zero")
        if not (neg.right_foot > 0.0 > pos.left_foot):
            raise ValueError(
                "last_action sets must overlap around zero"
                " (height defuzzification would be indeterminate)"
            )

        centers = {s.label: s.center for s in self.output_sets}
        object.__setattr__(
            self, "_rule_centers", tuple(centers[r.output] for r in self.rules)
        )

    @property
    def rule_output_centers(self) -> tuple[float, ...]:
        return self._rule_centers  # type: ignore[attr-defined]


def default_rulebase() -> FuzzyRuleBase:
    """The shipped partition and rule table.

    Seven triangular sets with centers on the thirds grid and 50% overlap
    (each foot on the neighbor's center, ends shouldered) for power change and
    output; two last-action sets N/P centered at -+0.5, shouldered outward,
    overlapping by +-0.05 around zero. Continue with magnitude tracking the
    power change while it falls; reverse, one level smaller, when it rises.
    """
    third = 1.0 / 3.0

    def seven() -> tuple[MembershipFunction, ...]:
        centers = (-1.0, -2.0 * third, -third, 0.0, third, 2.0 * third, 1.0)
        sets = []
        for i, (label, c) in enumerate(zip(POWER_LABELS, centers)):
            left = centers[i - 1] if i > 0 else c
            right = centers[i + 1] if i < len(centers) - 1 else c
            sets.append(MembershipFunction(label, left, c, right))
        return tuple(sets)

    last = (
        MembershipFunction("N", -0.5, -0.5, 0.05),
        MembershipFunction("P", -0.05, 0.5, 0.5),
    )
    table_n = ("NB", "NM", "NS", "ZE", "PS", "PS", "PM")
    table_p = ("PB", "PM", "PS", "ZE", "NS", "NS", "NM")
    rules = tuple(
        FuzzyRule(p, "N", out) for p, out in zip(POWER_LABELS, table_n)
    ) + tuple(
        FuzzyRule(p, "P", out) for p, out in zip(POWER_LABELS, table_p)
    )
    return FuzzyRuleBase(
        power_change_sets=seven(),
        last_action_sets=last,
        output_sets=seven(),
        rules=rules,
    )


@dataclass(frozen=True)
class ScalingGains:
    """Coefficients of the operating-point gains P_b = a*w + b and
    I_b = c1*w - c2*T + c3."""

    a: float   # W s/rad
    b: float   # W
    c1: float  # A s/rad
    c2: float  # A/(N m)
    c3: float  # A

    def validate_envelope(
        self, speed_range: tuple[float, float], torque_range: tuple[float, float]
    ) -> None:
        """Both gains are affine, so positivity over the box follows from
        positivity at its corners."""
        for w in speed_range:
            if input_gain_value(self, w) <= 0.0:
                raise ConfigError(
                    f"P_b = a*omega + b is not positive at omega = {w:g}",
                    key="fuzzy.scaling",
                )
            for t in torque_range:
                if output_gain_value(self, w, t) <= 0.0:
                    raise ConfigError(
                        f"I_b is not positive at omega = {w:g}, torque = {t:g}",
                        key="fuzzy.scaling",
                    )


def input_gain_value(gains: ScalingGains, omega_r: float) -> float:
    return gains.a * omega_r + gains.b


def output_gain_value(gains: ScalingGains, omega_r: float, torque_estimate: float) -> float:
    return gains.c1 * omega_r - gains.c2 * torque_estimate + gains.c3


def input_gain(gains: ScalingGains, omega_r: float) -> float:
    """Power normalization base at the given speed; positive or it is a
    configuration error."""
    p_b = input_gain_value(gains, omega_r)
    if p_b <= 0.0:
        raise ConfigError(
            f"input gain P_b = {p_b:g} at omega = {omega_r:g} must be > 0",
            key="fuzzy.scaling",
        )
    return p_b


def output_gain(gains: ScalingGains, omega_r: float, torque_estimate: float) -> float:
    """Excitation-step normalization base at the operating point; positive or
    it is a configuration error."""
    i_b = output_gain_value(gains, omega_r, torque_estimate)
    if i_b <= 0.0:
        raise ConfigError(
            f"output gain I_b = {i_b:g} at omega = {omega_r:g},"
            f" torque = {torque_estimate:g} must be > 0",
            key="fuzzy.scaling",
        )
    return i_b


def estimate_torque(params: MachineParams, i_ds_cmd: float, i_qs_cmd: float) -> float:
    """Command-based torque estimate K_t' * i_ds* * i_qs* (exact at
    field-oriented steady state)."""
    return params.torque_constant_current * i_ds_cmd * i_qs_cmd


def fuzzify(x: float, sets: tuple[MembershipFunction, ...]) -> dict[str, float]:
    """Membership degree of each set at x clamped into [-1, 1]."""
    if x > 1.0:
        x = 1.0
    elif x < -1.0:
        x = -1.0
    return {s.label: s.degree(x) for s in sets}


def infer(rulebase: FuzzyRuleBase, dp_pu: float, last_di_pu: float) -> tuple[float, ...]:
    """min-AND firing strength of every rule, in rule-table order."""
    power_deg = fuzzify(dp_pu, rulebase.power_change_sets)
    last_deg = fuzzify(last_di_pu, rulebase.last_action_sets)
    return tuple(
        min(power_deg[r.power], last_deg[r.last_action]) for r in rulebase.rules
    )


def height_defuzzify(strengths: tuple[float, ...], rulebase: FuzzyRuleBase) -> float:
    """Firing-strength-weighted mean of the consequent set centers."""
    centers = rulebase.rule_output_centers
    num = 0.0
    den = 0.0
    for w, c in zip(strengths, centers):
        num += w * c
        den += w
    if den == 0.0:
        raise InferenceError("no rule fired; rule base coverage is defective")
    return num / den


@dataclass(frozen=True)
class EfficiencyController:
    """Bundles rule base, scaling gains and machine constants for stepping."""

    rulebase: FuzzyRuleBase
    gains: ScalingGains
    params: MachineParams

    def output_base(self, omega_r: float, i_ds_cmd: float, i_qs_cmd: float) -> float:
        """I_b at the present operating point (torque estimated from commands)."""
        t_est = estimate_torque(self.params, i_ds_cmd, i_qs_cmd)
        return output_gain(self.gains, omega_r, t_est)


def efficiency_step(
    ctrl: EfficiencyController,
    dp_d: float,
    omega_r: float,
    i_ds_cmd: float,
    i_qs_cmd: float,
    last_di_ds: float,
) -> float:
    """One fuzzy search step: normalized inference scaled back to amperes.

    Returns I_b * defuzzify(infer(dP_d / P_b, last_di_ds / I_b)). Negative
    output continues the flux decrement, positive reverses it.
    """
    p_b = input_gain(ctrl.gains, omega_r)
    i_b = ctrl.output_base(omega_r, i_ds_cmd, i_qs_cmd)
    strengths = infer(ctrl.rulebase, dp_d / p_b, last_di_ds / i_b)
    return i_b * height_defuzzify(strengths, ctrl.rulebase)
