"""Distributed graph automata: alternating, nondeterministic and deterministic
automata on labeled directed graphs, their acceptance games, closure
constructions, the link with monadic second-order logic and bounded
emptiness checks."""

from .automaton import (Automaton, Configuration, Rule, State, StateKind, Variant, automaton_from_json,
                        automaton_to_json, classify, global_successors, initial_configuration, validate)
from .errors import (ContractError, DGAError, InvalidAutomatonError, InvalidInputError, ResourceLimitError,
                     SyntaxErrorAt, UndecidableError)
from .games import Run, accepts, build_game, extract_run, replay, solve
from .graphs import (Alphabet, LabeledGraph, enumerate_graphs, graph_from_json, graph_to_json, merge_asym,
                     merge_sym, mirror)
from .language import (EmptinessVerdict, LocalView, bounded_language_equal, check_mirroring, find_merge_pair,
                       local_view, merging_bound, ndga_emptiness)
from .transforms import (complement_ddga, dual, intersection, make_nonblocking, product, project, to_anf, trim,
                         union)

__version__ = "0.1.0"
