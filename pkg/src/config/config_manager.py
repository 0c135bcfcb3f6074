"""
Gestionnaire de Configuration des résolutions
Format texte à sections, import/export en YAML et JSON, surcharges par chemin pointé
"""

import dataclasses
import json
import logging
import re
from dataclasses import dataclass, field, fields
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import yaml

from ..core.exceptions import ParseError, ValidationError
from ..solver.problem import SolverConfig
from .catalog import build_components, uses_plugins, validate_catalog_params

logger = logging.getLogger(__name__)

SECTIONS = ('problem', 'field', 'boundary', 'solver', 'outputs')
SECTION_KEYS: Dict[str, Tuple[str, ...]] = {
    'problem': ('catalog', 'catalog_params', 'name', 'N', 'p', 'T', 'M', 'A', 'A_params', 'field'),
    'field': ('name', 'params'),
    'boundary': ('kind', 'params'),
    'solver': tuple(f.name for f in fields(SolverConfig)),
    'outputs': ('solution', 'report', 'study_grids', 'reference', 'study_table'),
}
TEXT_SUFFIXES = ('.cfg', '.ini', '.txt')

_SECTION_RE = re.compile(r'^\[([A-Za-z_]+)\]$')
_KEY_RE = re.compile(r'^[A-Za-z_][A-Za-z0-9_]*$')
_NUMBER_RE = re.compile(r'^[-+]?(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?$')

Lines = Dict[Tuple[str, str], Optional[int]]


@dataclass(frozen=True)
class ProblemConfig:
    catalog: Optional[str] = None
    catalog_params: Dict[str, Any] = field(default_factory=dict)
    name: Optional[str] = None
    N: Optional[int] = None
    p: Optional[float] = None
    T: Optional[float] = None
    M: Optional[float] = None
    A: Optional[str] = None
    A_params: Dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class FieldConfig:
    name: Optional[str] = None
    params: Dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class BoundaryConfig:
    kind: Optional[str] = None
    params: Dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class OutputsConfig:
    solution: str = 'solution.csv'
    report: str = 'report.json'
    study_grids: Optional[Tuple[int, ...]] = None
    reference: Optional[str] = None
    study_table: str = 'study.csv'


@dataclass(frozen=True)
class RunConfig:
    """Configuration complète d'une exécution : problème, solveur et sorties"""
    problem: ProblemConfig = dataclasses.field(default_factory=ProblemConfig)
    field: FieldConfig = dataclasses.field(default_factory=FieldConfig)
    boundary: BoundaryConfig = dataclasses.field(default_factory=BoundaryConfig)
    solver: Dict[str, Any] = dataclasses.field(default_factory=dict)
    outputs: OutputsConfig = dataclasses.field(default_factory=OutputsConfig)

    @property
    def is_catalog(self) -> bool:
        return self.problem.catalog is not None

    @property
    def label(self) -> str:
        return self.problem.name or self.problem.catalog or 'inline'


# ---------------------------------------------------------------------------
# Lecture
# ---------------------------------------------------------------------------

def _coerce(value: Any) -> Any:
    """Convertit les nombres que YAML laisse en chaînes (1e-10) et parcourt les collections"""
    if isinstance(value, str) and _NUMBER_RE.match(value):
        return float(value)
    if isinstance(value, list):
        return [_coerce(v) for v in value]
    if isinstance(value, dict):
        return {k: _coerce(v) for k, v in value.items()}
    return value


def decode_value(text: str, line: Optional[int] = None) -> Any:
    """Décode une valeur scalaire ou une collection YAML en ligne"""
    text = text.strip()
    if not text:
        return None
    try:
        return _coerce(yaml.safe_load(text))
    except yaml.YAMLError as e:
        raise ParseError(f"valeur illisible '{text}': {e.__class__.__name__}", line=line) from e


def read_sections(text: str) -> Tuple[Dict[str, Dict[str, Any]], Lines]:
    """
    Découpe le texte en sections [nom] et lignes clé = valeur

    Returns:
        Tuple: (valeurs par section, numéro de ligne par (section, clé))
    """
    raw: Dict[str, Dict[str, Any]] = {}
    lines: Lines = {}
    section: Optional[str] = None

    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped[0] in '#;':
            continue
        header = _SECTION_RE.match(stripped)
        if header:
            section = header.group(1)
            if section not in SECTIONS:
                raise ValidationError(f"section inconnue [{section}]", key=section, line=number)
            raw.setdefault(section, {})
            continue
        if section is None:
            raise ParseError(f"clé hors de toute section: '{stripped}'", line=number)
        key, sep, value = stripped.partition('=')
        key = key.strip()
        if not sep or not _KEY_RE.match(key):
            raise ParseError(f"ligne attendue de la forme 'clé = valeur', reçu '{stripped}'", line=number)
        if key not in SECTION_KEYS[section]:
            raise ValidationError(f"clé inconnue dans [{section}]", key=f'{section}.{key}', line=number)
        if key in raw[section]:
            raise ValidationError("clé définie deux fois", key=f'{section}.{key}', line=number)
        raw[section][key] = decode_value(value, number)
        lines[(section, key)] = number
    return raw, lines


def apply_overrides(raw: Dict[str, Dict[str, Any]], overrides: Sequence[str], lines: Optional[Lines] = None):
    """
    Applique des surcharges 'section.clé=valeur' (ou 'section.clé.sous_clé=valeur')

    Args:
        raw: Valeurs par section, modifiées en place
        overrides: Surcharges en ligne de commande
        lines: Numéros de ligne à invalider pour les clés surchargées
    """
    for override in overrides:
        path, sep, value = override.partition('=')
        parts = path.strip().split('.')
        if not sep or len(parts) < 2 or len(parts) > 3:
            raise ParseError(f"surcharge invalide '{override}' (attendu section.clé=valeur)")
        section, key = parts[0], parts[1]
        if section not in SECTIONS:
            raise ValidationError(f"section inconnue [{section}]", key=path)
        if key not in SECTION_KEYS[section]:
            raise ValidationError(f"clé inconnue dans [{section}]", key=path)
        decoded = decode_value(value)
        target = raw.setdefault(section, {})
        if len(parts) == 3:
            nested = dict(target.get(key) or {})
            nested[parts[2]] = decoded
            decoded = nested
        target[key] = decoded
        if lines is not None:
            lines.pop((section, key), None)
        logger.debug(f"Surcharge appliquée: {path} = {decoded!r}")


def _line_of(lines: Lines, key: Optional[str]) -> Optional[int]:
    if not key:
        return None
    head, _, rest = key.partition('.')
    if head == 'A':
        return lines.get(('problem', 'A_params')) or lines.get(('problem', 'A'))
    sub = rest.partition('.')[0]
    for candidate in ((head, sub), (head, 'params'), (head, 'catalog_params'), (head, 'kind'), (head, 'name')):
        if lines.get(candidate) is not None:
            return lines[candidate]
    return None


def _number(section: Dict[str, Any], key: str, path: str, lines: Lines) -> Optional[float]:
    value = section.get(key)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"nombre attendu, reçu {value!r}", key=path, line=_line_of(lines, path))
    return float(value)


def _mapping(section: Dict[str, Any], key: str, path: str, lines: Lines) -> Dict[str, Any]:
    value = section.get(key)
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise ValidationError(f"table {{clé: valeur}} attendue, reçu {value!r}", key=path, line=_line_of(lines, path))
    return dict(value)


def _text(section: Dict[str, Any], key: str, path: str, lines: Lines) -> Optional[str]:
    value = section.get(key)
    if value is None:
        return None
    if not isinstance(value, str):
        raise ValidationError(f"texte attendu, reçu {value!r}", key=path, line=_line_of(lines, path))
    return value


def config_from_sections(raw: Dict[str, Dict[str, Any]], lines: Optional[Lines] = None,
                         overrides: Sequence[str] = ()) -> RunConfig:
    """
    Valide des valeurs par section et construit un RunConfig

    Raises:
        ValidationError: Erreur sémantique, avec la clé et la ligne en cause
    """
    lines = dict(lines or {})
    raw = {name: dict(values or {}) for name, values in raw.items()}
    for name in raw:
        if name not in SECTIONS:
            raise ValidationError(f"section inconnue [{name}]", key=name)
        for key in raw[name]:
            if key not in SECTION_KEYS[name]:
                raise ValidationError(f"clé inconnue dans [{name}]", key=f'{name}.{key}', line=_line_of(lines, f'{name}.{key}'))
    apply_overrides(raw, overrides, lines)

    prob = raw.get('problem', {})
    fld = dict(raw.get('field', {}))
    bnd = raw.get('boundary', {})
    out = raw.get('outputs', {})

    if prob.get('field') is not None:
        if fld.get('name') is not None:
            raise ValidationError("champ défini à la fois dans [problem] et [field]", key='problem.field',
                                  line=lines.get(('problem', 'field')))
        fld['name'] = prob['field']
        lines[('field', 'name')] = lines.get(('problem', 'field'))

    N = prob.get('N')
    if N is not None:
        if isinstance(N, bool) or not isinstance(N, (int, float)) or int(N) != N or N < 1:
            raise ValidationError(f"N doit être un entier ≥ 1, reçu {N!r}", key='problem.N',
                                  line=_line_of(lines, 'problem.N'))
        N = int(N)

    problem = ProblemConfig(
        catalog=_text(prob, 'catalog', 'problem.catalog', lines),
        catalog_params=_mapping(prob, 'catalog_params', 'problem.catalog_params', lines),
        name=_text(prob, 'name', 'problem.name', lines),
        N=N,
        p=_number(prob, 'p', 'problem.p', lines),
        T=_number(prob, 'T', 'problem.T', lines),
        M=_number(prob, 'M', 'problem.M', lines),
        A=_text(prob, 'A', 'problem.A', lines),
        A_params=_mapping(prob, 'A_params', 'problem.A_params', lines),
    )

    grids = out.get('study_grids')
    if grids is not None:
        if not isinstance(grids, list) or not all(isinstance(g, (int, float)) and int(g) == g for g in grids):
            raise ValidationError(f"liste d'entiers attendue, reçu {grids!r}", key='outputs.study_grids',
                                  line=_line_of(lines, 'outputs.study_grids'))
        grids = tuple(int(g) for g in grids)
    outputs = OutputsConfig(
        solution=_text(out, 'solution', 'outputs.solution', lines) or OutputsConfig.solution,
        report=_text(out, 'report', 'outputs.report', lines) or OutputsConfig.report,
        study_grids=grids,
        reference=_text(out, 'reference', 'outputs.reference', lines),
        study_table=_text(out, 'study_table', 'outputs.study_table', lines) or OutputsConfig.study_table,
    )

    cfg = RunConfig(
        problem=problem,
        field=FieldConfig(name=_text(fld, 'name', 'field.name', lines),
                          params=_mapping(fld, 'params', 'field.params', lines)),
        boundary=BoundaryConfig(kind=_text(bnd, 'kind', 'boundary.kind', lines),
                                params=_mapping(bnd, 'params', 'boundary.params', lines)),
        solver={k: v for k, v in raw.get('solver', {}).items() if v is not None},
        outputs=outputs,
    )
    validate_config(cfg, lines)
    return cfg


def validate_config(cfg: RunConfig, lines: Optional[Lines] = None) -> None:
    """Contrôles sémantiques : exclusivité catalogue/en ligne, plages, construction des opérateurs"""
    lines = lines or {}
    problem = cfg.problem

    def fail(message: str, key: str):
        raise ValidationError(message, key=key, line=_line_of(lines, key))

    if problem.p is not None and problem.p < 2:
        fail(f"p doit être ≥ 2 (p must be ≥ 2), reçu {problem.p:g}", 'problem.p')
    if problem.T is not None and not problem.T > 0:
        fail(f"T doit être > 0, reçu {problem.T:g}", 'problem.T')
    if problem.M is not None and not problem.M > 0:
        fail(f"M doit être > 0, reçu {problem.M:g}", 'problem.M')

    if cfg.is_catalog:
        inline = [key for key, present in (
            ('problem.A', problem.A is not None),
            ('problem.A_params', bool(problem.A_params)),
            ('boundary.kind', cfg.boundary.kind is not None),
            ('boundary.params', bool(cfg.boundary.params)),
        ) if present]
        if inline:
            fail(f"référence au catalogue et définition en ligne exclusives ({', '.join(inline)})", 'problem.catalog')
        try:
            validate_catalog_params(problem.catalog, problem.catalog_params)
        except ValidationError as e:
            raise ValidationError(e.reason, key=e.key, line=_line_of(lines, e.key)) from e
    else:
        if problem.catalog_params:
            fail("catalog_params sans catalogue", 'problem.catalog_params')
        for key, value in (('problem.N', problem.N), ('problem.p', problem.p), ('problem.T', problem.T),
                           ('field.name', cfg.field.name), ('boundary.kind', cfg.boundary.kind)):
            if value is None:
                fail("clé requise manquante pour un problème en ligne", key)

    try:
        SolverConfig(**cfg.solver)
        if not uses_plugins(cfg):
            build_components(cfg)
    except ValidationError as e:
        raise ValidationError(e.reason, key=e.key, line=_line_of(lines, e.key)) from e
    except TypeError as e:
        fail(f"paramètres du solveur invalides: {e}", 'solver')


def parse_config(text: str, overrides: Sequence[str] = ()) -> RunConfig:
    """
    Analyse le format texte à sections et valide le résultat

    Args:
        text: Contenu [problem] / [field] / [boundary] / [solver] / [outputs]
        overrides: Surcharges 'section.clé=valeur' appliquées avant validation

    Returns:
        RunConfig: Configuration validée

    Raises:
        ParseError: Erreur de syntaxe (ligne en cause)
        ValidationError: Erreur sémantique (clé et ligne en cause)
    """
    raw, lines = read_sections(text)
    return config_from_sections(raw, lines, overrides)


# ---------------------------------------------------------------------------
# Écriture
# ---------------------------------------------------------------------------

def encode_value(value: Any) -> str:
    """Représentation YAML en ligne, relue à l'identique par decode_value"""
    if isinstance(value, tuple):
        value = list(value)
    text = yaml.safe_dump(value, default_flow_style=True, width=float('inf'), allow_unicode=True)
    if text.endswith('\n...\n'):
        text = text[:-len('\n...\n')]
    return text.strip()


def to_sections(cfg: RunConfig) -> Dict[str, Dict[str, Any]]:
    """Valeurs non vides par section, dans l'ordre canonique"""
    problem = cfg.problem
    sections = {
        'problem': {
            'catalog': problem.catalog, 'catalog_params': problem.catalog_params, 'name': problem.name,
            'N': problem.N, 'p': problem.p, 'T': problem.T, 'M': problem.M,
            'A': problem.A, 'A_params': problem.A_params,
        },
        'field': {'name': cfg.field.name, 'params': cfg.field.params},
        'boundary': {'kind': cfg.boundary.kind, 'params': cfg.boundary.params},
        'solver': dict(cfg.solver),
        'outputs': {
            'solution': cfg.outputs.solution, 'report': cfg.outputs.report,
            'study_grids': list(cfg.outputs.study_grids) if cfg.outputs.study_grids is not None else None,
            'reference': cfg.outputs.reference, 'study_table': cfg.outputs.study_table,
        },
    }
    return {name: {k: v for k, v in values.items() if v is not None and v != {}}
            for name, values in sections.items()}


def serialize(cfg: RunConfig) -> str:
    """Écrit une configuration au format texte à sections"""
    blocks = []
    for name, values in to_sections(cfg).items():
        if not values and name != 'problem':
            continue
        body = [f'{key} = {encode_value(value)}' for key, value in values.items()]
        blocks.append('\n'.join([f'[{name}]'] + body))
    return '\n\n'.join(blocks) + '\n'


class ConfigurationManager:
    """Gestionnaire de configuration pour import/export"""

    def __init__(self, config_dir: str = "configs"):
        self.config_dir = Path(config_dir)
        self.logger = logging.getLogger(__name__)

    def export_configuration(self, cfg: RunConfig, format: str = 'cfg', filename: Optional[str] = None) -> str:
        """
        Exporte une configuration

        Args:
            cfg: Configuration à exporter
            format: 'cfg', 'json' ou 'yaml'
            filename: Nom du fichier (optionnel)

        Returns:
            str: Chemin du fichier exporté
        """
        try:
            if not filename:
                timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
                filename = f"{cfg.label}_{timestamp}.{format}"
            self.config_dir.mkdir(parents=True, exist_ok=True)
            filepath = self.config_dir / filename

            if format.lower() == 'cfg':
                filepath.write_text(serialize(cfg), encoding='utf-8')
            elif format.lower() == 'json':
                with open(filepath, 'w', encoding='utf-8') as f:
                    json.dump(to_sections(cfg), f, indent=2, ensure_ascii=False)
            elif format.lower() in ('yaml', 'yml'):
                with open(filepath, 'w', encoding='utf-8') as f:
                    yaml.safe_dump(to_sections(cfg), f, default_flow_style=False, allow_unicode=True, sort_keys=False)
            else:
                raise ValueError(f"Format non supporté: {format}")

            self.logger.info(f"Configuration exportée: {filepath}")
            return str(filepath)

        except Exception as e:
            self.logger.error(f"Erreur lors de l'export: {e}")
            raise

    def import_configuration(self, filepath: str, overrides: Sequence[str] = ()) -> RunConfig:
        """
        Importe une configuration depuis un fichier (format choisi par l'extension)

        Args:
            filepath: Chemin vers le fichier de configuration
            overrides: Surcharges 'section.clé=valeur'

        Returns:
            RunConfig: Configuration validée
        """
        try:
            filepath = Path(filepath)

            if not filepath.exists():
                raise FileNotFoundError(f"Fichier non trouvé: {filepath}")

            suffix = filepath.suffix.lower()
            text = filepath.read_text(encoding='utf-8')
            if suffix in TEXT_SUFFIXES:
                cfg = parse_config(text, overrides)
            elif suffix == '.json':
                cfg = config_from_sections(_coerce(json.loads(text)), overrides=overrides)
            elif suffix in ('.yaml', '.yml'):
                cfg = config_from_sections(_coerce(yaml.safe_load(text) or {}), overrides=overrides)
            else:
                raise ValueError(f"Format de fichier non supporté: {filepath.suffix}")

            self.logger.info(f"Configuration importée: {filepath}")
            return cfg

        except Exception as e:
            self.logger.error(f"Erreur lors de l'import de {filepath}: {e}")
            raise

    def list_configurations(self) -> List[Dict[str, Any]]:
        """
        Liste les configurations valides du répertoire

        Returns:
            List: Configurations avec métadonnées, les plus récentes d'abord
        """
        configs = []
        if not self.config_dir.exists():
            return configs

        for filepath in self.config_dir.glob("*"):
            if filepath.suffix.lower() in TEXT_SUFFIXES + ('.json', '.yaml', '.yml'):
                try:
                    cfg = self.import_configuration(str(filepath))
                    stat = filepath.stat()
                    configs.append({
                        'filename': filepath.name,
                        'filepath': str(filepath),
                        'name': cfg.label,
                        'catalog': cfg.problem.catalog,
                        'format': filepath.suffix.lower(),
                        'updated_at': datetime.fromtimestamp(stat.st_mtime).isoformat(),
                        'size': stat.st_size,
                    })
                except Exception as e:
                    self.logger.warning(f"Impossible de lire {filepath}: {e}")

        return sorted(configs, key=lambda x: x['updated_at'], reverse=True)
