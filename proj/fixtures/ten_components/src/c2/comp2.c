extern bool FA;
extern bool FB;
extern bool FC;
extern bool FD;
extern bool FE;

int sig3 = 0;
int sig12 = 0;
extern int sig1;

int act1() {
    return 1;
}

int poll1() {
    if (sig1 > 0) {
        act1();
    }
    return 0;
}

int send3() {
    if (FC) {
        sig3 = sig3 + 1;
    }
    return 0;
}

int send12() {
    if (!FA) {
        sig12 = sig12 + 1;
    }
    return 0;
}
