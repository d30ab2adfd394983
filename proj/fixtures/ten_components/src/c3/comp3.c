extern bool FA;
extern bool FB;
extern bool FC;
extern bool FD;
extern bool FE;

int sig4 = 0;
int sig13 = 0;
int sig14 = 0;
extern int sig2;

int act2() {
    return 2;
}

int poll2() {
    if (sig2 > 0) {
        act2();
    }
    return 0;
}

int send4() {
    if (FA) {
        sig4 = sig4 + 1;
    }
    return 0;
}

int send13() {
    if (FE) {
        sig13 = sig13 + 1;
    }
    return 0;
}

int send14() {
    sig14 = sig14 + 1;
    return 0;
}
