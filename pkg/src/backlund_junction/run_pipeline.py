"""
MAIN PIPELINE - Reproduce every figure case plus the exact-reservoir and Airy-seed checks
Ladder -> Charge-neutral solves -> Reservoir matching -> Airy seed -> Verification
"""
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import numpy as np
import pandas as pd

from backlund_junction.analysis import (
    SolutionAnalyzer, bc_noninvariance_demo, j_zero_transform_positivity, positivity_count_stability,
    sign_lemma_sweep,
)
from backlund_junction.bvp import BoundarySpec, assemble_full_domain, solve
from backlund_junction.config import FIGURE_CASES, FIGURES_DIR
from backlund_junction.exact_solutions import (
    AirySeedParams, PlanckSeedParams, ReservoirProfile, airy_seed, matched_amplitude, planck_seed,
    reservoir_fields,
)
from backlund_junction.export_results import export_tables, write_result
from backlund_junction.model_core import DimensionalParams, ModelParams, dimensionalize
from backlund_junction.transforms import current_ladder_dimensional, gambier_plus, generate_sequence
from backlund_junction.verify import run_suites

# NaCl in a 1 micron junction
NACL = DimensionalParams(delta=1e-4, D_plus=1.33e-5, D_minus=2.03e-5)
EXPECTED_POSITIVE_STATES = 7


def _solve_case(name):
    case = FIGURE_CASES[name]
    if case['bc'] == 'neutral':
        spec = BoundarySpec.charge_neutral(case['c0'], case['c1'], case['j0'])
    else:
        spec = BoundarySpec.radiation(case['c0'], case['c1'], case['j0'])
    return solve(spec, ModelParams(case['lambda'], case['alpha_plus'])), spec


def _field_table(s, points=201):
    x = np.linspace(0.0, 1.0, points)
    sample = s.sample(x)
    mask = sample.regular
    return pd.DataFrame({'x': x, 'c_plus': np.where(mask, sample.c_plus, np.nan),
                         'c_minus': np.where(mask, sample.c_minus, np.nan),
                         'E': np.where(mask, sample.e, np.nan)})


def reproduce_ladder(tables, summary, failures):
    case = FIGURE_CASES['fig1_ladder']
    seed = planck_seed(PlanckSeedParams(case['c0'], case['A']), ModelParams.from_lambda2(case['lambda2']))
    report = generate_sequence(seed, case['n_min'], case['n_max'])
    reach = report.positive_reach()
    stability = positivity_count_stability(seed, case['n_max'])
    fluxes = dimensionalize(NACL, case['A'], case['A'])
    tables['fig1_ladder'] = report.table
    tables['fig1_stability'] = stability
    tables['fig1_dimensional'] = current_ladder_dimensional(NACL, fluxes, range(case['n_min'], case['n_max'] + 1))
    for n in range(case['n_min'], case['n_max'] + 1):
        tables[f'fig1_member_{n:+d}'] = _field_table(report.members[n])
    summary['fig1'] = {'positive_states': reach, 'stability': stability.to_dict(orient='list'),
                       'theta': report.theta, 'B': report.B}
    print(f"  ✓ Ladder n in [{case['n_min']}, {case['n_max']}]: ground state plus {reach} excited states "
          f"and their conjugates are positive")
    if reach != EXPECTED_POSITIVE_STATES or stability['positive_states'].nunique() != 1:
        failures.append(f'fig1: {reach} positive excited states, expected {EXPECTED_POSITIVE_STATES}')


def reproduce_neutral(tables, summary, failures):
    for name, expect in (('fig2_left', 'decreasing'), ('fig2_right', 'increasing')):
        m, _ = _solve_case(name)
        analyzer = SolutionAnalyzer(m, name=name)
        results = analyzer.run_full_analysis()
        print(analyzer.get_report())
        c0, c1 = m.spec.left, m.spec.right
        summary[name] = {'c0_E0': c0 * float(m.e[0]), 'c1_E1': c1 * float(m.e[-1]),
                         'A_plus': m.a_plus, 'A_minus': m.a_minus, 'analysis': results,
                         'zero_current': j_zero_transform_positivity(m).as_dict(),
                         'neutrality_defects': bc_noninvariance_demo(m).as_dict()}
        tables[name] = m.table()
        if results.get('monotonicity') != expect:
            failures.append(f'{name}: E is {results.get("monotonicity")}, expected {expect}')

    for name, signs in (('fig3_left', (1, 1)), ('fig3_right', (-1, 1))):
        m, _ = _solve_case(name)
        tables[name] = m.table()
        found = (int(np.sign(m.a_plus)), int(np.sign(m.a_minus)))
        summary[name] = {'A_plus': m.a_plus, 'A_minus': m.a_minus, 'negative_concentration': m.negative_concentration}
        print(f"  ✓ {name}: A+ = {m.a_plus:.6g}, A- = {m.a_minus:.6g}")
        if found != signs:
            failures.append(f'{name}: sign pattern {found}, expected {signs}')


def reproduce_reservoirs(tables, summary, failures):
    m, spec = _solve_case('fig4_radiation')
    profile = assemble_full_domain(m, spec)
    tables['fig4_left'] = profile.left
    tables['fig4_slab'] = profile.slab
    tables['fig4_right'] = profile.right
    summary['fig4'] = {'A_plus': m.a_plus, 'A_minus': m.a_minus, 'reservoirs': profile.reservoirs,
                       'continuity': profile.continuity}
    print(f"  ✓ Radiation solve stitched to linearized reservoirs "
          f"(jumps {profile.continuity['jump_left']:.1e}, {profile.continuity['jump_right']:.1e})")

    # exact versus linearized profile with the same interface potential
    left = profile.reservoirs['left']
    exact = ReservoirProfile('left', left['c_infinity'], left['lambda'], amplitude=matched_amplitude(left['phi0']))
    tables['fig4_exact_reservoir'] = profile.left[['x']].assign(
        **dict(zip(('c_plus', 'c_minus', 'E'), reservoir_fields(exact, profile.left['x'].to_numpy()))))


def reproduce_airy(tables, summary, failures):
    case = FIGURE_CASES['fig1_ladder']
    p = AirySeedParams(case['c0'], case['A'])
    seed = airy_seed(p, ModelParams.from_lambda2(case['lambda2']))
    image = gambier_plus(seed)
    tables['airy_seed'] = _field_table(seed)
    tables['airy_gambier_image'] = _field_table(image)
    summary['airy_seed'] = {'A_plus': seed.a_plus, 'A_minus': seed.a_minus,
                             'image_A_plus': image.a_plus, 'image_A_minus': image.a_minus}
    print(f"  ✓ Airy seed A- = {seed.a_minus:.6g}; its Gambier image has A+ = A- = {image.a_plus:.6g}")


def run_full_pipeline(out_dir=FIGURES_DIR, xlsx=None):
    """Execute every reproduction step; returns the list of unmet expectations"""
    print("\n")
    print("╔" + "═" * 68 + "╗")
    print("║" + " " * 18 + "BACKLUND JUNCTION REPRODUCTION" + " " * 20 + "║")
    print("║" + " " * 12 + "Ladder → Neutral solves → Reservoirs → Airy seed" + " " * 8 + "║")
    print("╚" + "═" * 68 + "╝")
    print("\n")

    tables, summary, failures = {}, {}, []

    print("🪜 Step 1: Flux-quantization ladder of the Planck seed...")
    reproduce_ladder(tables, summary, failures)

    print("\n⚡ Step 2: Charge-neutral boundary-value problems...")
    reproduce_neutral(tables, summary, failures)

    print("\n🌊 Step 3: Radiation conditions and reservoir matching...")
    reproduce_reservoirs(tables, summary, failures)

    print("\n📐 Step 4: Airy seed and Gambier map...")
    reproduce_airy(tables, summary, failures)

    print("\n🎲 Step 5: Sign lemma on random charge-neutral problems...")
    sweep = sign_lemma_sweep()
    tables['sign_lemma_sweep'] = sweep
    converged = sweep[sweep['converged']]
    holds = int(converged['lemma_holds'].astype(bool).sum())
    print(f"  ✓ {holds}/{len(converged)} converged cases satisfy the sign lemma")
    if holds != len(converged):
        failures.append('sign lemma violated on the random sweep')
    positive = int(converged['positive'].astype(bool).sum())
    print(f"  ✓ {positive}/{len(converged)} converged cases keep c+ and c- strictly positive")
    if positive != len(converged):
        failures.append('negative concentration on the random sweep')

    print("\n🔍 Step 6: Property suites...")
    checks = run_suites('all')
    tables['verify'] = checks
    failed = checks[~checks['passed']]
    print(f"  ✓ {int(checks['passed'].sum())}/{len(checks)} checks passed")
    failures += [f"verify: {check}" for check in failed['check']]

    print("\n📊 Step 7: Exporting tables...")
    summary['failures'] = failures
    write_result(summary, os.path.join(out_dir, 'summary.json'))
    for path in export_tables(tables, out_dir, xlsx):
        print(f"  ✓ Saved: {path}")

    print("\n")
    print("╔" + "═" * 68 + "╗")
    if failures:
        print("║" + " " * 18 + f"REPRODUCTION FINISHED: {len(failures)} ISSUES ⚠️".ljust(50) + "║")
    else:
        print("║" + " " * 20 + "REPRODUCTION COMPLETE! ✅" + " " * 23 + "║")
    print("╚" + "═" * 68 + "╝")
    for failure in failures:
        print(f"  ⚠ {failure}")
    print("\n")
    return failures


if __name__ == '__main__':
    sys.exit(1 if run_full_pipeline() else 0)
