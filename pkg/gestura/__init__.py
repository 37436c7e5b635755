from gestura.coordination import DEFAULT_PSI_TABLE, PsiTable, coordinate
from gestura.errors import GesturaError
from gestura.experiments import SynthesisSettings, synthesize_word
from gestura.parsing import parse_word
