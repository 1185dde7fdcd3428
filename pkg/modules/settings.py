# Settings for toro, the 2D toroidalization engine
# 2025 toro
import configparser
import os

# messages
NO_CONFIG = "Check the config.ini against config.template file for missing sections or values."
TOROIDAL_MSG = "morphism is toroidal (log smooth) at every germ"

# defaults, overwritten from config.ini below
MAX_STEPS = 64 # safety valve for the toroidalization loop
PRINCIPALIZE_CAP = 256 # X blowups allowed inside one canonical principalization
SERIES_ORDER = 8 # extra truncation order when reading subcase data off fractional pullbacks
LOGGING_LEVEL = "INFO"
syslog_to_file = False
log_backup_count = 7
log_file = "logs/toro.log"
trace_logging = False
check_formulas = True
factor_atlas = True
corpus_dir = "etc/data/corpus"
golden_dir = "etc/data/golden"
verify_threads = 4

# Read the config file, if it does not exist, create basic config file
config = configparser.ConfigParser()
config_file = os.environ.get("TORO_CONFIG", "config.ini")

try:
    config.read(config_file, encoding='utf-8')
except Exception as e:
    print(f"System: Error reading config file: {e}")
    print(f"System: {NO_CONFIG}")
    print(f"System: Exiting...")
    exit(1)

def write_config():
    try:
        with open(config_file, 'w') as f:
            config.write(f)
    except OSError as e:
        # read-only checkouts still run on defaults
        print(f"System: Could not write {config_file}: {e}")

if config.sections() == []:
    print(f"System: {config_file} is empty or does not exist, creating defaults.")
    config['general'] = {'sysloglevel': 'INFO', 'SyslogToFile': 'False', 'LogBackupCount': '7', 'log_file': 'logs/toro.log', 'traceLogging': 'False'}
    write_config()
    print(f"System: Config file created, check {config_file} or review the config.template")

if 'algorithm' not in config:
    config['algorithm'] = {'max_steps': '64', 'principalize_cap': '256', 'series_order': '8', 'check_formulas': 'True', 'factor_atlas': 'True'}
    write_config()

if 'verify' not in config:
    config['verify'] = {'corpus_dir': 'etc/data/corpus', 'golden_dir': 'etc/data/golden', 'threads': '4'}
    write_config()

# variables from the config.ini file
try:
    # general
    LOGGING_LEVEL = config['general'].get('sysloglevel', 'INFO').upper()
    syslog_to_file = config['general'].getboolean('SyslogToFile', False)
    log_backup_count = config['general'].getint('LogBackupCount', 7)
    log_file = config['general'].get('log_file', 'logs/toro.log')
    trace_logging = config['general'].getboolean('traceLogging', False)

    # algorithm
    MAX_STEPS = config['algorithm'].getint('max_steps', 64)
    PRINCIPALIZE_CAP = config['algorithm'].getint('principalize_cap', 256)
    SERIES_ORDER = config['algorithm'].getint('series_order', 8)
    check_formulas = config['algorithm'].getboolean('check_formulas', True)
    factor_atlas = config['algorithm'].getboolean('factor_atlas', True)

    # verify
    corpus_dir = config['verify'].get('corpus_dir', 'etc/data/corpus')
    golden_dir = config['verify'].get('golden_dir', 'etc/data/golden')
    verify_threads = config['verify'].getint('threads', 4)
except Exception as e:
    print(f"System: Error reading config file: {e}")
    print(f"System: {NO_CONFIG}")
    print("System: Exiting...")
    exit(1)

# environment override for the step limit
if os.environ.get("TORO_MAX_STEPS"):
    try:
        MAX_STEPS = int(os.environ["TORO_MAX_STEPS"])
    except ValueError:
        print(f"System: TORO_MAX_STEPS must be an integer, got {os.environ['TORO_MAX_STEPS']!r}")
        exit(1)
