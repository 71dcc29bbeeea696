"""Two-sided matching under hereditary distributional constraints.

Constraint algebra with brute-force and structural convexity checks,
generalized deferred acceptance and its multi-stage variant, adaptive
deferred acceptance, serial dictatorship, artificial-cap deferred
acceptance, an axiom-audit suite, Mallows-model market generation, and
an efficiency/fairness experiment harness.
"""
from .constraints import (And, BlackBox, CheckResult, CollegeCap, Constraint,
                          EnumerationCapExceeded, LinearCap, Or, Shift,
                          SpecError, Truncate, UpperBound, certify_mnatural,
                          checker_for, is_hereditary, is_mnatural_convex,
                          max_quota, regional_cap, shift, truncate)
from .market import (Market, MarketError, default_weights, example1_market,
                     is_matching, make_market, matched_college, nu_of,
                     prefers, replace_student_prefs, restrict_students)
from .choice import (ChoiceError, ch_colleges_bruteforce, ch_colleges_greedy,
                     ch_student, ch_students, single_rejection_step)
from .mechanisms import (AlwaysOne, DisjunctiveCommit, DSelectionStrategy,
                         Fixed, LinearCapMax, MechanismError, MechanismTrace,
                         NonConvexSpecError, QuotaError, StageDecision,
                         UncertifiedDError, acda, ada, da,
                         default_strategy_for, flexible_quota_spec, gda,
                         gda_alt, msgda, sd, uniform_feasible_quotas)
from .audit import (AuditReport, audit, borda_scores, claims_empty_seat,
                    envy_matrix, envy_ratios, generalized_envy, hm_stable,
                    justified_envy, ml_fair, pareto_frontier_check,
                    strategyproofness_audit, strongly_claims)
from .genmarket import (MallowsParams, MarketConfig, build_market1,
                        build_market2, instance_rng, kendall_tau,
                        mallows_probability, mallows_sample,
                        sample_preference_profile, uniform_college_prefs)
from .marketio import (constraint_from_dict, constraint_to_dict, load_market,
                       market_from_dict, market_to_dict, matching_from_dict,
                       matching_to_dict, save_market)
from .experiment import (CSV_COLUMNS, ExperimentPlan, run_instance,
                         run_mechanism, run_plan, rows_to_csv, write_csv)

__all__ = [name for name in dir() if not name.startswith("_")]
