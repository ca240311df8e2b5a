"""Monadic second-order logic on labeled graphs."""

from .compile import CompileReport, base_automaton, compile, compile_formula, exactly_one
from .semantics import (Assignment, compile_on, decode_assignment, encode_assignment, evaluate,
                        pair_alphabet, pair_label, split_label)
from .syntax import (BOTTOM, TOP, And, Const, Edge, Eq, ExistsNode, ExistsSet, ForallNode, ForallSet,
                     Formula, Iff, Implies, In, Lab, Not, Or, free_vars, is_sentence, parse, render)
from .sentences import BENCHMARKS, minor_sentence, phi_3color, phi_centric, phi_minor_k3, phi_planar
from .translate import automaton_to_sentence
