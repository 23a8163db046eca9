from qcfix.cli import main

main()
