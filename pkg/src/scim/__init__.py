"""Interpreter for situated construction grammars.

Grammars declare schemas, contexts and s-constructions; the engine matches
s-constructions against a working memory of situated instances and explores
alternative interpretations as scored branches.
"""

from .constraints import BindingEnv, Verdict, evaluate, is_ancestor, unify, validate_instance
from .engine import SearchConfig, enumerate_matches, fire, oracle_matches, run, score
from .errors import ScimError
from .hierarchy import TypeHierarchy, build_hierarchy, is_subtype, resolve_role_path
from .lexer import tokenize
from .memory import (BranchState, create_instance, fork_branch, load_state, mutate_role,
                     remove_situated, replay, situate)
from .parser import parse_program, parse_source
from .printer import format_program
from .program import CompiledProgram, diagnose, load_files, load_program, validate

__version__ = "0.1.0"
